// solitons.hpp -- ODE solvers for the translating bowl and the rotationally
// symmetric self-shrinker caps, with residual checks for the defining
// equations.
#pragma once

#include "mcflab/geometry.hpp"
#include "mcflab/profile.hpp"

namespace mcflab {

// Translator profile: f_rr/(1+f_r^2) + f_r/r = c, f(0) = 0, f_r(0) = 0.
struct BowlProfile {
  double speed = 1.0;
  GraphProfile profile;
  std::vector<double> fr;  // integrator slope at the nodes
  double residual_max = 0.0;
};

// RK4 on g' = (1+g^2)(c - g/r), seeded by the series g = (c/2) r + (c^3/32) r^3
// near the origin. Residual of the defining equation <= 1e-8 at all nodes
// (fourth-order stencils).
BowlProfile solve_bowl(double c, double r_max, double h);

// Shrinker cap u(y) on [0, a]: u'' = (1+u'^2)(1/u - (u - y u')/2), u'(0) = 0,
// u(a) = 0, the free value u(0) ( > sqrt2 ) found by bisection so the first
// zero lands at y = a. The tip is carried in the graph-over-disk chart
// z = G(rho) (regular at rho = 0) from the node where |u'| first exceeds 0.15.
struct ShrinkerProfile {
  double a = 0.0;
  Grid1D ygrid;            // [0, a]
  std::vector<double> u;   // radius per node, u.back() == 0
  std::vector<double> du;  // integrator slope u'
  int switch_node = -1;    // first node with |u'| >= 0.15
  // tip chart: y = G(rho) on a uniform rho-grid [0, rho_max]
  double tip_h = 0.0;
  std::vector<double> tipG, tipGp;
  double u0 = 0.0;  // shot value u(0)

  RadialProfile to_radial() const;  // r(z) = u(-z) on z in [-a, 0]
  // Radius at a given y by Hermite interpolation of (u, du).
  double radius_at(double y) const;
};

struct ShrinkerDiagnostics {
  std::vector<double> trial_u0;  // bisection trace
};
ShrinkerProfile solve_shrinker(double a, double h, ShrinkerDiagnostics* diag = nullptr);

// max |H - <x,nu>/2| over interior nodes, second-order stencils (the spec'd
// check for generic radius profiles).
double shrinker_residual(const RadialProfile& p);

// Chart-aware residual for a solved cap: z-chart away from the tip, rho-chart
// near it, fourth-order stencils; evaluated for y <= y_max.
double shrinker_profile_residual(const ShrinkerProfile& s, double y_max);

// Difference of the weighted boundary fluxes of e^{-|x|^2/4} x^tan through
// the circles at z = L1 and z = L2, minus the interior term
// int (2 - |x|^2/2) e^{-|x|^2/4} dA over the band. Equals
// -int e^{-|x|^2/4} (H - <x,nu>/2) <x,nu> dA, hence 0 for exact shrinkers.
double weighted_flux_difference(const RadialProfile& p, double L1, double L2);

}  // namespace mcflab
