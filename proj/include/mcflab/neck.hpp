// neck.hpp -- epsilon-neck detection, normalized rotation vector fields,
// symmetry-defect measurement, rotation-field comparison, the model-equation
// neck-improvement experiment, and the <K,nu> evolution-identity check.
#pragma once

#include <map>

#include "mcflab/flow.hpp"
#include "mcflab/profile.hpp"
#include "mcflab/solitons.hpp"

namespace mcflab {

// K(x) = S J S^T (x - q) with J = [[0,1,0],[-1,0,0],[0,0,0]].
struct RotationField {
  Mat3 S;
  Vec3 q{0.0, 0.0, 0.0};

  Vec3 value(const Vec3& x) const;
  Vec3 axis() const { return S.apply({0.0, 0.0, 1.0}); }
  RotationField flipped() const;  // -K as a normalized field
  static RotationField about_axis(const Vec3& axis, const Vec3& point);
  // two tilts about x1/x2 plus a transverse offset (the 4-parameter family
  // modulo the stabilizer of the axis)
  static RotationField from_tilt_offset(double tilt_x, double tilt_y, double qx, double qy);
  // max |antisymmetry defect| of the numerical Jacobian at a sample point
  double killing_defect(const Vec3& x, double h = 1e-6) const;
};

// Space-time samples of a neck written as a graph over the x3-axis:
// radius(theta, z, t) = sqrt(-2t) + u, z in [-L/4, L/4], t in [-L^2/16, -1],
// scale normalized so H = 1/sqrt2 at (z=0, t=-1).
struct NeckPatch {
  double L = 20.0;
  int ntheta = 32;
  Grid1D zgrid;  // [-L/4, L/4]
  Grid1D tgrid;  // [-L^2/16, -1]
  std::vector<double> u;  // [it][itheta][iz]

  void validate() const;
  int nz() const { return zgrid.n; }
  int nt() const { return tgrid.n; }
  double theta(int j) const { return 2.0 * M_PI * j / ntheta; }
  size_t idx(int it, int j, int i) const {
    return (static_cast<size_t>(it) * ntheta + j) * zgrid.n + i;
  }
  double& at(int it, int j, int i) { return u[idx(it, j, i)]; }
  double at(int it, int j, int i) const { return u[idx(it, j, i)]; }
  double radius(int it, int j, int i) const {
    return std::sqrt(-2.0 * tgrid.node(it)) + at(it, j, i);
  }
  // time-slice as an offset graph (rho() returns the true radius)
  CylinderGraph slice(int it) const;
};

NeckPatch make_cylinder_patch(double L, int ntheta, int nz, int nt,
                              const std::function<double(double, double, double)>& pert = {});
// Patch around the bowl point at radius r0 (exact translator motion).
NeckPatch make_bowl_patch(const BowlProfile& bowl, double r0, double L, int ntheta, int nz,
                          int nt);

struct NeckFit {
  Vec3 axis{0, 0, 1};
  Vec3 center{0, 0, 0};
  double radius = 0.0;
  double eps_measured = 0.0;  // parabolic-normalized C^2 distance to sqrt(-2t)
  bool is_neck = true;
};
NeckFit fit_neck(const NeckPatch& patch);

// sup |<K,nu>| H over P(center, 10, 100) truncated to the patch; *coverage
// (when given) receives the covered fraction of the requested window.
double symmetry_defect(const NeckPatch& patch, const RotationField& K,
                       double* coverage = nullptr);

struct BestRotation {
  RotationField K;
  double eps = 0.0;
  bool converged = true;
};
// Gauss-Newton over (2 tilts, 2 offsets) from the fit_neck axis; sign fixed
// by making the theta-averaged <K, e_theta> at the center nonnegative.
BestRotation best_rotation(const NeckPatch& patch);

// min over the sign of sup |K1 -+ K2| over the ball of radius 100 H(center)^-1
// intersected with the patch, times H(center).
double compare_rotation_fields(const RotationField& K1, const RotationField& K2,
                               const NeckPatch& patch, double* coverage = nullptr);

// One dictionary term of the improvement-experiment boundary data.
// m >= 2: u += weight (-2t)^{1/2} (z / (L/4))^zdeg trig(m theta)
// m == 1: u += weight (z-affine) trig(theta)   (static; absorbable)
// m == 0: u += weight (constant; the Step-7 constraint mode)
struct ModeTerm {
  int m = 2;
  int zdeg = 0;  // 0 or 1
  int parity = 0;  // 0 = cos, 1 = sin
  double weight = 1.0;
};

struct ImprovementResult {
  double factor = 0.0;      // center defect / input eps
  double input_eps = 0.0;
  double center_eps = 0.0;
  double amplitude = 0.0;   // data scale chosen so the boundary is eps-symmetric
  double vhat_heat_residual = 0.0;
  std::map<int, double> mode_decay;  // per-m center amplitude ratio
  double m0_center_max = 0.0;
  double coverage = 0.0;
};
// Solves u_t = u_zz + u_thth/(-2t) + u/(-2t) per Fourier mode (the rescaled
// modes vhat_m = (-t)^{(1-m^2)/2} v_m satisfy the heat equation and are
// advanced by Crank-Nicolson), with boundary data from the dictionary scaled
// so every boundary window is eps-symmetric after its own best m=1 affine
// adjustment. Measures the center defect with best_rotation at t = -1.
ImprovementResult neck_improvement_experiment(double L, double eps,
                                              const std::vector<ModeTerm>& mix,
                                              int ntheta = 32, int nz = 201, int nt_store = 33);

// max |d/dt <K,nu> - (Delta_M <K,nu> + |A|^2 <K,nu> + advection)| over an
// equally spaced radius-form trajectory; the advection term converts the
// fixed-z graph derivative to the normal-motion derivative.
double K_nu_evolution_residual(const Trajectory& traj, const RotationField& K);

}  // namespace mcflab
