#include "mcflab/geometry.hpp"

#include <algorithm>

namespace mcflab {

CurvatureData curvature_radial(const RadialProfile& p) {
  p.validate();
  const int n = p.grid.n;
  const double h = p.grid.h();
  const auto rz = deriv1(p.r, h);
  const auto rzz = deriv2(p.r, h);
  CurvatureData c;
  c.H.resize(n);
  c.k1.resize(n);
  c.k2.resize(n);
  c.nu.resize(n);
  for (int i = 0; i < n; ++i) {
    const double q = 1.0 + rz[i] * rz[i];
    const double sq = std::sqrt(q);
    c.k1[i] = -rzz[i] / (q * sq);
    c.k2[i] = (p.r[i] > 0.0) ? 1.0 / (p.r[i] * sq) : 0.0;
    c.H[i] = c.k1[i] + c.k2[i];
    c.nu[i] = {1.0 / sq, 0.0, -rz[i] / sq};
  }
  return c;
}

CurvatureData curvature_graph(const GraphProfile& g) {
  g.validate();
  const int n = g.grid.n;
  const double h = g.grid.h();
  // even extension across r = 0: central stencils with f(-r) = f(r)
  std::vector<double> fr(n), frr(n);
  {
    auto d1 = deriv1(g.f, h);
    auto d2 = deriv2(g.f, h);
    fr = d1;
    frr = d2;
    fr[0] = 0.0;
    frr[0] = 2.0 * (g.f[1] - g.f[0]) / (h * h);
    if (n >= 2) fr[1] = (g.f[2] - g.f[0]) / (2.0 * h);  // already central
  }
  CurvatureData c;
  c.H.resize(n);
  c.k1.resize(n);
  c.k2.resize(n);
  c.nu.resize(n);
  for (int i = 0; i < n; ++i) {
    const double q = 1.0 + fr[i] * fr[i];
    const double sq = std::sqrt(q);
    c.k1[i] = frr[i] / (q * sq);
    // rotational term f_r/(r sqrt(q)); limit f_rr at the tip
    c.k2[i] = (i == 0) ? frr[0] : fr[i] / (g.grid.node(i) * sq);
    c.H[i] = c.k1[i] + c.k2[i];
    c.nu[i] = {-fr[i] / sq, 0.0, 1.0 / sq};  // upward graph normal (outward for convex caps)
  }
  return c;
}

CylinderGraphGeometry cylinder_graph_geometry(const CylinderGraph& g) {
  g.validate();
  const int nt = g.ntheta, nz = g.nz();
  const double hz = g.zgrid.h(), ht = g.htheta();
  CylinderGraphGeometry geo;
  geo.ntheta = nt;
  geo.nz = nz;
  const size_t sz = static_cast<size_t>(nt) * nz;
  geo.W.resize(sz);
  geo.H.resize(sz);
  geo.x_dot_nu.resize(sz);
  geo.cosg.resize(sz);
  geo.nu_x.resize(sz);
  geo.nu_y.resize(sz);
  geo.nu_z.resize(sz);
  auto U = [&](int j, int i) { return g.at((j % nt + nt) % nt, std::clamp(i, 0, nz - 1)); };
  for (int j = 0; j < nt; ++j) {
    const double th = g.theta(j), cth = std::cos(th), sth = std::sin(th);
    for (int i = 0; i < nz; ++i) {
      const double rho = g.rho(j, i);
      const double rt = (U(j + 1, i) - U(j - 1, i)) / (2.0 * ht);
      double rz, rzz;
      if (i == 0) {
        rz = (-3.0 * U(j, 0) + 4.0 * U(j, 1) - U(j, 2)) / (2.0 * hz);
        rzz = (2.0 * U(j, 0) - 5.0 * U(j, 1) + 4.0 * U(j, 2) - U(j, 3)) / (hz * hz);
      } else if (i == nz - 1) {
        rz = (3.0 * U(j, i) - 4.0 * U(j, i - 1) + U(j, i - 2)) / (2.0 * hz);
        rzz = (2.0 * U(j, i) - 5.0 * U(j, i - 1) + 4.0 * U(j, i - 2) - U(j, i - 3)) / (hz * hz);
      } else {
        rz = (U(j, i + 1) - U(j, i - 1)) / (2.0 * hz);
        rzz = (U(j, i + 1) - 2.0 * U(j, i) + U(j, i - 1)) / (hz * hz);
      }
      const double rtt = (U(j + 1, i) - 2.0 * U(j, i) + U(j - 1, i)) / (ht * ht);
      double rtz;
      if (i == 0 || i == nz - 1) {
        const int s = (i == 0) ? 1 : -1;
        rtz = s * ((U(j + 1, i + s) - U(j - 1, i + s)) - (U(j + 1, i) - U(j - 1, i))) / (2.0 * ht * hz);
      } else {
        rtz = (U(j + 1, i + 1) - U(j + 1, i - 1) - U(j - 1, i + 1) + U(j - 1, i - 1)) /
              (4.0 * ht * hz);
      }
      const double E = rho * rho + rt * rt;
      const double F = rt * rz;
      const double G = 1.0 + rz * rz;
      const double W2 = rho * rho * G + rt * rt;
      const double W = std::sqrt(W2);
      // second fundamental form against the outward normal
      const double Lf = (rho * rtt - rho * rho - 2.0 * rt * rt) / W;
      const double Mf = (rho * rtz - rt * rz) / W;
      const double Nf = rho * rzz / W;
      const size_t k = static_cast<size_t>(j) * nz + i;
      geo.W[k] = W;
      geo.H[k] = -(E * Nf - 2.0 * F * Mf + G * Lf) / W2;
      geo.x_dot_nu[k] = rho * (rho - g.zgrid.node(i) * rz) / W;
      geo.cosg[k] = rho / W;
      geo.nu_x[k] = (rho * cth + rt * sth) / W;
      geo.nu_y[k] = (rho * sth - rt * cth) / W;
      geo.nu_z[k] = -rho * rz / W;
    }
  }
  return geo;
}

double gaussian_area(const RadialProfile& p, GaussStatus* status) {
  p.validate();
  const int n = p.grid.n;
  const double h = p.grid.h();
  const auto rz = deriv1(p.r, h);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) {
    const double z = p.grid.node(i);
    f[i] = 2.0 * M_PI * p.r[i] * std::sqrt(1.0 + rz[i] * rz[i]) *
           std::exp(-(p.r[i] * p.r[i] + z * z) / 4.0);
  }
  if (status) {
    status->end_integrand = std::max(std::abs(f.front()), std::abs(f.back()));
    status->truncation_warning =
        status->end_integrand > 1e-16 && !p.tip_at_lo() && !p.tip_at_hi();
  }
  return simpson(f, h);
}

double gaussian_area(const CylinderGraph& g, GaussStatus* status) {
  const auto geo = cylinder_graph_geometry(g);
  const int nt = g.ntheta, nz = g.nz();
  std::vector<double> zline(nz), tline(nt);
  double worst_end = 0.0;
  for (int i = 0; i < nz; ++i) {
    const double z = g.zgrid.node(i);
    for (int j = 0; j < nt; ++j) {
      const double rho = g.rho(j, i);
      tline[j] = geo.W[static_cast<size_t>(j) * nz + i] * std::exp(-(rho * rho + z * z) / 4.0);
    }
    zline[i] = periodic_trapezoid(tline, g.htheta());
    if (i == 0 || i == nz - 1) worst_end = std::max(worst_end, max_abs(tline));
  }
  if (status) {
    status->end_integrand = worst_end;
    status->truncation_warning = worst_end > 1e-16;
  }
  return simpson(zline, g.zgrid.h());
}

namespace {
CrossSection concavity_from_sqrtA(std::vector<double> sqrtA) {
  CrossSection cs;
  double viol = 0.0;
  for (size_t i = 1; i + 1 < sqrtA.size(); ++i)
    viol = std::max(viol, sqrtA[i + 1] - 2.0 * sqrtA[i] + sqrtA[i - 1]);
  cs.sqrtA = std::move(sqrtA);
  cs.concavity_violation = std::max(0.0, viol);
  return cs;
}
}  // namespace

CrossSection cross_section_sqrt_area(const RadialProfile& p) {
  p.validate();
  std::vector<double> s(p.grid.n);
  for (int i = 0; i < p.grid.n; ++i) s[i] = std::sqrt(M_PI) * p.r[i];
  return concavity_from_sqrtA(std::move(s));
}

CrossSection cross_section_sqrt_area(const CylinderGraph& g) {
  g.validate();
  const int nt = g.ntheta, nz = g.nz();
  std::vector<double> s(nz), tline(nt);
  for (int i = 0; i < nz; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double rho = g.rho(j, i);
      tline[j] = 0.5 * rho * rho;
    }
    s[i] = std::sqrt(periodic_trapezoid(tline, g.htheta()));
  }
  return concavity_from_sqrtA(std::move(s));
}

NoncollapsingResult noncollapsing_ratio(const RadialProfile& p) {
  p.validate();
  const int n = p.grid.n;
  const double h = p.grid.h();
  const auto c = curvature_radial(p);
  const auto rz = deriv1(p.r, h);
  NoncollapsingResult res;
  // discrete convexity of the enclosed region: r_zz <= tol nodewise
  for (int i = 1; i + 1 < n; ++i)
    if (p.r[i + 1] - 2.0 * p.r[i] + p.r[i - 1] > 10.0 * h * h) res.convex = false;

  const double tip = p.tip_threshold();
  const bool open_lo = p.r.front() > tip, open_hi = p.r.back() > tip;
  const double zlo = p.grid.lo, zhi = p.grid.hi;
  const double rmax = *std::max_element(p.r.begin(), p.r.end());

  // radius of the region at height z, with clamped extension past open ends
  auto region_r = [&](double z) -> double {
    if (z < zlo) return open_lo ? p.r.front() : 0.0;
    if (z > zhi) return open_hi ? p.r.back() : 0.0;
    return catmull_rom(p.r, zlo, h, z);
  };

  res.ratio = 1e300;
  const double slack = 1e-9 * std::max(1.0, rmax);
  for (int i = 1; i + 1 < n; ++i) {
    if (p.r[i] <= tip || std::abs(rz[i]) > 2.0) continue;
    const Vec3 nu = c.nu[i];  // (nu_rho, 0, nu_z) in the meridian plane
    const double z0 = p.grid.node(i), r0 = p.r[i];
    auto fits = [&](double rho) {
      const double cx = r0 - rho * nu[0];
      const double cz = z0 - rho * nu[2];
      // sample cross-sections at grid spacing over the ball's z-extent
      const int m = std::max(8, static_cast<int>(std::ceil(2.0 * rho / h)));
      for (int k = 0; k <= m; ++k) {
        const double z = cz - rho + 2.0 * rho * k / m;
        const double s2 = rho * rho - (z - cz) * (z - cz);
        const double s = std::sqrt(std::max(0.0, s2));
        if (std::abs(cx) + s > region_r(z) + slack) return false;
      }
      return true;
    };
    const double hi_bracket = 2.0 * (rmax + (zhi - zlo));
    double rho_star;
    if (!fits(1e-6 * rmax)) continue;  // degenerate node (kinks); skip
    rho_star = bisect_feasible(fits, 1e-6 * rmax, hi_bracket, 1e-10 * rmax);
    const double v = rho_star * c.H[i];
    if (v < res.ratio) {
      res.ratio = v;
      res.worst_node = i;
    }
    ++res.evaluated_nodes;
  }
  if (res.evaluated_nodes == 0) throw std::domain_error("noncollapsing_ratio: no valid nodes");
  return res;
}

ContainmentResult surface_containment(const RadialProfile& inner, const RadialProfile& outer) {
  inner.validate();
  outer.validate();
  const double lo = std::max(inner.grid.lo, outer.grid.lo);
  const double hi = std::min(inner.grid.hi, outer.grid.hi);
  if (!(hi > lo)) throw std::invalid_argument("surface_containment: disjoint z-ranges");
  const double h = std::min(inner.grid.h(), outer.grid.h());
  const int n = std::max(3, static_cast<int>(std::round((hi - lo) / h)) + 1);
  const Grid1D common = Grid1D::linspace(lo, hi, n);
  const auto a = resample(inner, common);
  const auto b = resample(outer, common);
  ContainmentResult res;
  res.margin = 1e300;
  for (int i = 0; i < n; ++i) res.margin = std::min(res.margin, b.r[i] - a.r[i]);
  res.contained = res.margin >= 0.0;
  return res;
}

}  // namespace mcflab
