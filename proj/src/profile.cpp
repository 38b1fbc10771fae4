#include "mcflab/profile.hpp"

#include <algorithm>

namespace mcflab {

void RadialProfile::validate() const {
  grid.validate();
  if (static_cast<int>(r.size()) != grid.n)
    throw std::invalid_argument("RadialProfile: r size mismatch");
  for (int i = 1; i + 1 < grid.n; ++i)
    if (!(r[i] > 0.0)) throw std::domain_error("RadialProfile: non-positive interior radius");
  if (r.front() < 0.0 || r.back() < 0.0)
    throw std::domain_error("RadialProfile: negative boundary radius");
}

void GraphProfile::validate() const {
  grid.validate();
  if (grid.lo != 0.0) throw std::invalid_argument("GraphProfile: grid must start at r = 0");
  if (static_cast<int>(f.size()) != grid.n)
    throw std::invalid_argument("GraphProfile: f size mismatch");
}

void CylinderGraph::validate() const {
  zgrid.validate();
  if (ntheta < 4) throw std::invalid_argument("CylinderGraph: ntheta >= 4 required");
  if (u.size() != static_cast<size_t>(ntheta) * zgrid.n)
    throw std::invalid_argument("CylinderGraph: u size mismatch");
  for (double v : u)
    if (!(kSqrt2 + v > 0.0)) throw std::domain_error("CylinderGraph: sqrt2 + u <= 0");
}

RadialProfile make_cylinder(double radius, double zlo, double zhi, int n) {
  RadialProfile p{Grid1D::linspace(zlo, zhi, n), std::vector<double>(n, radius)};
  p.validate();
  return p;
}

RadialProfile make_sphere_radial(double R, double zmax, int n) {
  if (zmax > R) throw std::invalid_argument("make_sphere_radial: zmax <= R required");
  RadialProfile p{Grid1D::linspace(-zmax, zmax, n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double z = p.grid.node(i);
    p.r[i] = std::sqrt(std::max(0.0, R * R - z * z));
  }
  return p;
}

RadialProfile make_bowl_asymptotic(double c, double zlo, double zhi, int n) {
  if (zlo <= 0.0) throw std::invalid_argument("make_bowl_asymptotic: zlo > 0 required");
  RadialProfile p{Grid1D::linspace(zlo, zhi, n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) p.r[i] = std::sqrt(2.0 * p.grid.node(i) / c);
  p.validate();
  return p;
}

RadialProfile make_capped_cylinder(double R, double zlo, double zcap, int n) {
  RadialProfile p{Grid1D::linspace(zlo, zcap + R, n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double z = p.grid.node(i);
    p.r[i] = (z <= zcap) ? R : std::sqrt(std::max(0.0, R * R - (z - zcap) * (z - zcap)));
  }
  return p;
}

GraphProfile make_spherical_cap(double R, double rmax, int n) {
  if (rmax >= R) throw std::invalid_argument("make_spherical_cap: rmax < R required");
  GraphProfile g{Grid1D::linspace(0.0, rmax, n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double r = g.grid.node(i);
    g.f[i] = R - std::sqrt(R * R - r * r);
  }
  g.validate();
  return g;
}

CylinderGraph make_cylinder_graph(double zlo, double zhi, int nz, int ntheta) {
  CylinderGraph g;
  g.ntheta = ntheta;
  g.zgrid = Grid1D::linspace(zlo, zhi, nz);
  g.u.assign(static_cast<size_t>(ntheta) * nz, 0.0);
  g.validate();
  return g;
}

RadialProfile resample(const RadialProfile& p, const Grid1D& zgrid) {
  p.validate();
  zgrid.validate();
  const double eps = 1e-12 * (p.grid.hi - p.grid.lo);
  if (zgrid.lo < p.grid.lo - eps || zgrid.hi > p.grid.hi + eps)
    throw std::invalid_argument("resample: target range outside source range");
  auto mc = MonotoneCubic::fit(p.grid.nodes(), p.r);
  RadialProfile q{zgrid, std::vector<double>(zgrid.n)};
  for (int i = 0; i < zgrid.n; ++i) q.r[i] = std::max(0.0, mc(zgrid.node(i)));
  return q;
}

RadialProfile graph_to_radial(const GraphProfile& g, const Grid1D& zgrid) {
  g.validate();
  // f must be strictly increasing away from the tip for the inverse to exist
  for (int i = 1; i < g.grid.n; ++i)
    if (!(g.f[i] > g.f[i - 1]))
      throw std::domain_error("graph_to_radial: f not strictly increasing");
  if (zgrid.lo < g.f.front() - 1e-12 || zgrid.hi > g.f.back() + 1e-12)
    throw std::invalid_argument("graph_to_radial: z-range outside graph range");
  auto inv = MonotoneCubic::fit(g.f, g.grid.nodes());
  RadialProfile p{zgrid, std::vector<double>(zgrid.n)};
  for (int i = 0; i < zgrid.n; ++i) p.r[i] = std::max(0.0, inv(zgrid.node(i)));
  return p;
}

CylinderGraph radial_to_cylinder_graph(const RadialProfile& p, int ntheta) {
  p.validate();
  CylinderGraph g = make_cylinder_graph(p.grid.lo, p.grid.hi, p.grid.n, ntheta);
  for (int j = 0; j < ntheta; ++j)
    for (int i = 0; i < p.grid.n; ++i) g.at(j, i) = p.r[i] - kSqrt2;
  g.validate();
  return g;
}

}  // namespace mcflab
