// dynamics.hpp -- the Merle-Zaag three-block mode system with stochastic
// coupling, the half-line heat barrier psi, and the monotone-quantity checks
// for rotationally symmetric flows (Harnack derivatives, r r_z, r_zz decay).
#pragma once

#include <cstdint>
#include <random>

#include "mcflab/flow.hpp"
#include "mcflab/profile.hpp"

namespace mcflab {

struct MZState {
  double tau = 0.0;
  double U_plus = 0.0, U_zero = 0.0, U_minus = 0.0;
};

struct MZParams {
  double coupling_amplitude = 0.1;   // eps(tau) = amplitude * exp(tau/1000)
  std::uint64_t seed = 0;            // recorded in outputs
};

inline double mz_coupling(const MZParams& p, double tau) {
  return p.coupling_amplitude * std::exp(tau / 1000.0);
}

// RK4 on dU+/dtau = U+ + a+ eps S, dU0 = a0 eps S, dU- = -U- + a- eps S with
// S = U+ + U0 + U- and a_i resampled uniformly in [-1,1] each step (held
// fixed within a step). Components clipped at 0; stops early on overflow.
std::vector<MZState> mz_simulate(const MZParams& p, const MZState& init, double tau_end,
                                 double dt);

enum class MZClass { plus_dominant, zero_dominant, undecided };
struct MZClassification {
  MZClass verdict = MZClass::undecided;
  double final_ratio_plus = 0.0;   // (U0+U-)/U+ at the end
  double final_ratio_zero = 0.0;   // (U++U-)/U0 at the end
  double slope = 0.0;              // fitted slope of the winning ratio
};
// Fits both ratios on the final third; classifies by which falls below 1e-3
// with a slope that is not significantly positive (3 standard errors).
MZClassification mz_classify(const std::vector<MZState>& traj);

// psi(z,t) = (4 pi t)^{-1/2} int_0^inf (e^{-(z-y)^2/4t} - e^{-(z+y)^2/4t}) dy.
// Closed form erf(z / (2 sqrt t)), validated against the defining integral.
double psi(double z, double t);
double psi_zz(double z, double t);
// Adaptive quadrature of the defining integral (the validation oracle).
double psi_defining_integral(double z, double t, double tol = 1e-12);
// |psi_t - psi_zz| by fourth-order stencils at parabolic-relative spacing.
double psi_heat_residual(double z, double t);

// Finite-difference f_t, f_tt, f_tr over an equally spaced graph trajectory.
struct HarnackReport {
  double min_ftt = 0.0, min_ftr = 0.0, min_ft = 0.0;
  double max_ftt = 0.0, max_ftr = 0.0, max_ft = 0.0;
  double tip_speed = 0.0;  // mean tip f_t over the last quarter (the H surrogate)
  int worst_node_ftt = -1, worst_node_ftr = -1;
};
HarnackReport harnack_checks(const Trajectory& traj);

// r r_z series, its max over the neck region (r_z <= eps0), and a two-point
// Richardson limit in 1/z.
struct RrzReport {
  std::vector<double> rrz;
  double neck_max = 0.0;
  double limit = 0.0;
  bool has_neck = false;  // some node with |r_z| <= eps0
  double H_ref = 1.0;
};
RrzReport rrz_profile(const RadialProfile& p, double H_ref, double eps0 = 0.05);

// Empirical constants of the r_zz decay: C2 = sup_{r >= C1} r^{5/2} (-r_zz),
// with C1 the threshold radius used (default 10).
struct RzzDecay {
  double C1 = 10.0, C2 = 0.0;
};
RzzDecay rzz_decay(const RadialProfile& p, double threshold_radius = 10.0);

}  // namespace mcflab
