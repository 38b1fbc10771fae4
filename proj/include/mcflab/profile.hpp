// profile.hpp -- discrete axisymmetric surfaces: radius graphs r(z), height
// graphs f(r), and normal-offset graphs u(theta,z) over the round cylinder
// Sigma = {x1^2 + x2^2 = 2}.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mcflab/numerics.hpp"

namespace mcflab {

inline constexpr double kSqrt2 = 1.4142135623730951;

struct Grid1D {
  double lo = 0.0, hi = 1.0;
  int n = 3;

  static Grid1D linspace(double lo, double hi, int n) {
    Grid1D g{lo, hi, n};
    g.validate();
    return g;
  }
  void validate() const {
    if (n < 3) throw std::invalid_argument("Grid1D: n >= 3 required");
    if (!(hi > lo)) throw std::invalid_argument("Grid1D: hi > lo required");
  }
  double h() const { return (hi - lo) / (n - 1); }
  double node(int i) const { return lo + i * h(); }
  std::vector<double> nodes() const {
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = node(i);
    return z;
  }
};

// Surface of revolution sampled as radius r(z) >= 0. Interior radii must be
// positive; a boundary node may carry r = 0 to mark a closed tip.
struct RadialProfile {
  Grid1D grid;  // z
  std::vector<double> r;

  void validate() const;
  bool tip_at_lo() const { return r.front() <= tip_threshold(); }
  bool tip_at_hi() const { return r.back() <= tip_threshold(); }
  double tip_threshold() const { return std::max(2.0 * grid.h(), 1e-9); }
};

// Rotational graph f(r) with the tip at r = 0; f_r(0) = 0 by evenness.
struct GraphProfile {
  Grid1D grid;  // r, grid.lo == 0
  std::vector<double> f;

  void validate() const;
};

// Normal-offset graph over Sigma: surface points
// ((sqrt2+u) cos th, (sqrt2+u) sin th, z), u sampled on ntheta x nz
// (theta-major), theta_j = 2 pi j / ntheta.
struct CylinderGraph {
  int ntheta = 8;
  Grid1D zgrid;
  std::vector<double> u;  // size ntheta * zgrid.n

  void validate() const;
  int nz() const { return zgrid.n; }
  double theta(int j) const { return 2.0 * M_PI * j / ntheta; }
  double htheta() const { return 2.0 * M_PI / ntheta; }
  double& at(int j, int i) { return u[static_cast<size_t>(j) * zgrid.n + i]; }
  double at(int j, int i) const { return u[static_cast<size_t>(j) * zgrid.n + i]; }
  double rho(int j, int i) const { return kSqrt2 + at(j, i); }
};

// --- factories -------------------------------------------------------------

RadialProfile make_cylinder(double radius, double zlo, double zhi, int n);
// r(z) = sqrt(R^2 - z^2), |z| <= zmax <= R.
RadialProfile make_sphere_radial(double R, double zmax, int n);
// r(z) = sqrt(2 z / c) on [zlo, zhi], zlo > 0 (far-field translator shape).
RadialProfile make_bowl_asymptotic(double c, double zlo, double zhi, int n);
// Capped cylinder: r = R on [zlo, zcap], spherical cap of radius R beyond,
// closing at zcap + R.
RadialProfile make_capped_cylinder(double R, double zlo, double zcap, int n);
GraphProfile make_spherical_cap(double R, double rmax, int n);
CylinderGraph make_cylinder_graph(double zlo, double zhi, int nz, int ntheta);

// --- conversions & resampling ----------------------------------------------

// Monotone-cubic resample onto a new z-grid; target range must lie inside
// the source range.
RadialProfile resample(const RadialProfile& p, const Grid1D& zgrid);

// Invert a strictly increasing height graph f(r) into r(z) on zgrid
// (zgrid range must lie in [f(0), f(rmax)]).
RadialProfile graph_to_radial(const GraphProfile& g, const Grid1D& zgrid);

// Axisymmetric radial profile around the cylinder as an offset graph;
// requires |r - sqrt2| small enough to stay a graph.
CylinderGraph radial_to_cylinder_graph(const RadialProfile& p, int ntheta);

}  // namespace mcflab
