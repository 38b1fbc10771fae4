#include "mcflab/solitons.hpp"

#include <algorithm>
#include <cmath>

namespace mcflab {

namespace {

// translator slope ODE: g' = (1+g^2)(c - g/r)
double bowl_rhs(double c, double r, double g) { return (1.0 + g * g) * (c - g / r); }

struct ShrinkState {
  double u, v;  // radius and slope
};

ShrinkState shrink_rhs(double y, const ShrinkState& s) {
  const double q = 1.0 + s.v * s.v;
  return {s.v, q * (1.0 / s.u - (s.u - y * s.v) / 2.0)};
}

ShrinkState rk4_shrink(double y, const ShrinkState& s, double dy) {
  const ShrinkState k1 = shrink_rhs(y, s);
  const ShrinkState k2 = shrink_rhs(y + dy / 2, {s.u + dy / 2 * k1.u, s.v + dy / 2 * k1.v});
  const ShrinkState k3 = shrink_rhs(y + dy / 2, {s.u + dy / 2 * k2.u, s.v + dy / 2 * k2.v});
  const ShrinkState k4 = shrink_rhs(y + dy, {s.u + dy * k3.u, s.v + dy * k3.v});
  return {s.u + dy / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
          s.v + dy / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

// Advance one grid step with internal halving when the slope is steep
// relative to the remaining radius. Returns false (and the crossing height)
// when u hits zero inside the step.
bool shrink_step(double y, ShrinkState& s, double h, double* y_zero) {
  int k = 1;
  const double scale = std::abs(s.v) * h / std::max(s.u, 1e-8);
  if (scale > 0.02) k = std::min(1 << 22, 1 << static_cast<int>(std::ceil(std::log2(scale / 0.02))));
  const double dy = h / k;
  for (int i = 0; i < k; ++i) {
    const ShrinkState prev = s;
    const double y0 = y + i * dy;
    s = rk4_shrink(y0, s, dy);
    if (!(s.u > 0.0) || !std::isfinite(s.u) || !std::isfinite(s.v)) {
      // locate the zero by bisection on sub-intervals of the last substep
      double lo = 0.0, hi = dy;
      ShrinkState slo = prev;
      for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, y0); ++it) {
        const double mid = 0.5 * (lo + hi);
        ShrinkState sm = rk4_shrink(y0 + lo, slo, mid - lo);
        if (sm.u > 0.0 && std::isfinite(sm.u)) {
          slo = sm;
          lo = mid;
        } else {
          hi = mid;
        }
      }
      *y_zero = y0 + 0.5 * (lo + hi);
      return false;
    }
  }
  return true;
}

// First zero of u for the shot value u0, or +inf if none before y_limit.
double shoot_first_zero(double u0, double h, double y_limit) {
  ShrinkState s{u0, 0.0};
  double y = 0.0, y_zero = 0.0;
  while (y < y_limit) {
    const double step = std::min(h, y_limit - y);
    if (!shrink_step(y, s, step, &y_zero)) return y_zero;
    y += step;
  }
  return 1e300;
}

}  // namespace

BowlProfile solve_bowl(double c, double r_max, double h) {
  if (!(c > 0.0)) throw std::invalid_argument("solve_bowl: c > 0 required");
  if (!(r_max > 0.0) || h > r_max / 100.0)
    throw std::invalid_argument("solve_bowl: need r_max > 0 and h <= r_max/100");
  const int n = static_cast<int>(std::round(r_max / h)) + 1;
  BowlProfile bowl;
  bowl.speed = c;
  bowl.profile.grid = Grid1D::linspace(0.0, r_max, n);
  const double hh = bowl.profile.grid.h();
  bowl.profile.f.assign(n, 0.0);
  bowl.fr.assign(n, 0.0);
  // series seed at the first node: g = (c/2) r + (c^3/32) r^3
  bowl.fr[1] = c / 2.0 * hh + c * c * c / 32.0 * hh * hh * hh;
  bowl.profile.f[1] = c / 4.0 * hh * hh + c * c * c / 128.0 * hh * hh * hh * hh;
  double f = bowl.profile.f[1], g = bowl.fr[1];
  for (int i = 1; i + 1 < n; ++i) {
    const double r = bowl.profile.grid.node(i);
    const double k1g = bowl_rhs(c, r, g);
    const double k2g = bowl_rhs(c, r + hh / 2, g + hh / 2 * k1g);
    const double k3g = bowl_rhs(c, r + hh / 2, g + hh / 2 * k2g);
    const double k4g = bowl_rhs(c, r + hh, g + hh * k3g);
    const double k1f = g, k2f = g + hh / 2 * k1g, k3f = g + hh / 2 * k2g, k4f = g + hh * k3g;
    g += hh / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
    f += hh / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    bowl.fr[i + 1] = g;
    bowl.profile.f[i + 1] = f;
  }
  // residual of the defining equation, fourth-order stencils
  const auto frr = deriv1_o4(bowl.fr, hh);
  double worst = std::abs(2.0 * frr[0] - c) / 2.0;  // tip: f_t(0)/2 vs c/2
  for (int i = 1; i < n; ++i) {
    const double r = bowl.profile.grid.node(i);
    const double res = frr[i] / (1.0 + bowl.fr[i] * bowl.fr[i]) + bowl.fr[i] / r - c;
    worst = std::max(worst, std::abs(res));
  }
  bowl.residual_max = worst;
  return bowl;
}

ShrinkerProfile solve_shrinker(double a, double h, ShrinkerDiagnostics* diag) {
  if (!(a >= 4.0)) throw std::invalid_argument("solve_shrinker: a >= 4 required");
  if (!(h > 0.0) || h > 1e-3 * a)
    throw std::invalid_argument("solve_shrinker: h <= 1e-3 * a required");
  const double y_limit = a + 2.0;
  double lo = kSqrt2 * (1.0 + 1e-13), hi = 2.0;
  if (shoot_first_zero(lo, h, y_limit) < a)
    throw std::runtime_error("solve_shrinker: bracket failure at the cylinder end");
  if (shoot_first_zero(hi, h, y_limit) > a)
    throw std::runtime_error("solve_shrinker: bracket failure at the sphere end");
  double best_u0 = hi, best_err = 1e300;
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double yz = shoot_first_zero(mid, h, y_limit);
    if (diag) diag->trial_u0.push_back(mid);
    const double err = std::abs(yz - a);
    if (err < best_err) {
      best_err = err;
      best_u0 = mid;
    }
    if (err <= 0.25 * h || hi - lo < 8e-16 * hi) break;
    (yz > a ? lo : hi) = mid;
  }
  if (best_err > h) {
    std::string trace = "solve_shrinker: bisection failed; trial u0 values:";
    if (diag)
      for (double t : diag->trial_u0) trace += " " + std::to_string(t);
    throw std::runtime_error(trace);
  }

  // final pass on the node grid
  ShrinkerProfile sp;
  sp.a = a;
  sp.u0 = best_u0;
  const int n = static_cast<int>(std::round(a / h)) + 1;
  sp.ygrid = Grid1D::linspace(0.0, a, n);
  const double hh = sp.ygrid.h();
  sp.u.assign(n, 0.0);
  sp.du.assign(n, 0.0);
  sp.u[0] = best_u0;
  ShrinkState s{best_u0, 0.0};
  int last = 0;
  for (int i = 0; i + 1 < n; ++i) {
    double y_zero;
    if (!shrink_step(sp.ygrid.node(i), s, hh, &y_zero)) break;
    sp.u[i + 1] = s.u;
    sp.du[i + 1] = s.v;
    last = i + 1;
    if (sp.switch_node < 0 && std::abs(s.v) >= 0.15) sp.switch_node = i + 1;
  }
  for (int i = last + 1; i < n; ++i) {
    sp.u[i] = 0.0;
    sp.du[i] = sp.du[last];
  }
  sp.u[n - 1] = 0.0;
  if (sp.switch_node < 0 || sp.switch_node < 8)
    throw std::runtime_error("solve_shrinker: slope switch too close to the equator");

  // tip chart z = G(rho), integrated inward from the switch node
  const double rho_s = sp.u[sp.switch_node];
  const double hrho = std::min(2.5e-4, hh / 4.0);
  const int nr = static_cast<int>(std::floor(rho_s / hrho)) + 1;
  sp.tip_h = rho_s / (nr - 1);
  sp.tipG.assign(nr, 0.0);
  sp.tipGp.assign(nr, 0.0);
  sp.tipG[nr - 1] = sp.ygrid.node(sp.switch_node);
  sp.tipGp[nr - 1] = 1.0 / sp.du[sp.switch_node];
  auto grhs = [](double rho, double G, double Gp) {
    return -(1.0 + Gp * Gp) * (Gp / rho + (G - rho * Gp) / 2.0);
  };
  double G = sp.tipG[nr - 1], Gp = sp.tipGp[nr - 1];
  for (int k = nr - 1; k >= 2; --k) {
    const double rho = k * sp.tip_h, dr = -sp.tip_h;
    const double k1p = grhs(rho, G, Gp), k1g = Gp;
    const double k2p = grhs(rho + dr / 2, G + dr / 2 * k1g, Gp + dr / 2 * k1p);
    const double k2g = Gp + dr / 2 * k1p;
    const double k3p = grhs(rho + dr / 2, G + dr / 2 * k2g, Gp + dr / 2 * k2p);
    const double k3g = Gp + dr / 2 * k2p;
    const double k4p = grhs(rho + dr, G + dr * k3g, Gp + dr * k3p);
    const double k4g = Gp + dr * k3p;
    G += dr / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
    Gp += dr / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    sp.tipG[k - 1] = G;
    sp.tipGp[k - 1] = Gp;
  }
  // close the last segment with the even local model G' ~ G''(0) rho
  const double gpp = grhs(sp.tip_h, sp.tipG[1], sp.tipGp[1]);
  sp.tipG[0] = sp.tipG[1] - sp.tip_h * sp.tipGp[1] + 0.5 * sp.tip_h * sp.tip_h * gpp;
  sp.tipGp[0] = 0.0;
  return sp;
}

RadialProfile ShrinkerProfile::to_radial() const {
  const int n = ygrid.n;
  RadialProfile p{Grid1D::linspace(-a, 0.0, n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) p.r[i] = u[n - 1 - i];
  return p;
}

double ShrinkerProfile::radius_at(double y) const {
  const double hh = ygrid.h();
  double s = std::clamp(y / hh, 0.0, double(ygrid.n - 1));
  const int i = std::min(static_cast<int>(std::floor(s)), ygrid.n - 2);
  const double t = s - i;
  const double y0 = u[i], y1 = u[i + 1], d0 = du[i] * hh, d1 = du[i + 1] * hh;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * d1;
}

double shrinker_residual(const RadialProfile& p) {
  p.validate();
  const auto c = curvature_radial(p);
  const auto rz = deriv1(p.r, p.grid.h());
  double worst = 0.0;
  for (int i = 1; i + 1 < p.grid.n; ++i) {
    const double z = p.grid.node(i);
    const double xnu = (p.r[i] - z * rz[i]) / std::sqrt(1.0 + rz[i] * rz[i]);
    worst = std::max(worst, std::abs(c.H[i] - 0.5 * xnu));
  }
  return worst;
}

double shrinker_profile_residual(const ShrinkerProfile& s, double y_max) {
  // z-chart with the integrator slope, one fourth-order derivative
  const double hh = s.ygrid.h();
  const auto upp = deriv1_o4(s.du, hh);
  double worst = 0.0;
  for (int i = 0; i <= s.switch_node; ++i) {
    const double y = s.ygrid.node(i);
    if (y > y_max) break;
    const double v = s.du[i], q = 1.0 + v * v, sq = std::sqrt(q);
    const double H = -upp[i] / (q * sq) + 1.0 / (s.u[i] * sq);
    const double xnu = (s.u[i] - y * v) / sq;
    worst = std::max(worst, std::abs(H - 0.5 * xnu));
  }
  // rho-chart near the tip
  const auto Gpp = deriv1_o4(s.tipGp, s.tip_h);
  for (size_t k = 0; k < s.tipG.size(); ++k) {
    if (s.tipG[k] > y_max) continue;
    const double Gp = s.tipGp[k], q = 1.0 + Gp * Gp, sq = std::sqrt(q);
    const double rho = k * s.tip_h;
    const double krot = (k == 0) ? -Gpp[0] : -Gp / (rho * sq);
    const double H = -Gpp[k] / (q * sq) + krot;
    const double xnu = (s.tipG[k] - rho * Gp) / sq;
    worst = std::max(worst, std::abs(H - 0.5 * xnu));
  }
  return worst;
}

double weighted_flux_difference(const RadialProfile& p, double L1, double L2) {
  p.validate();
  if (!(L1 < L2)) throw std::invalid_argument("weighted_flux_difference: L1 < L2 required");
  if (L1 < p.grid.lo - 1e-12 || L2 > p.grid.hi + 1e-12)
    throw std::invalid_argument("weighted_flux_difference: [L1,L2] outside profile");
  const double h = p.grid.h();
  // snap to grid nodes; the identity is evaluated on the profile's own nodes
  const int i1 = static_cast<int>(std::round((L1 - p.grid.lo) / h));
  const int i2 = static_cast<int>(std::round((L2 - p.grid.lo) / h));
  if (i2 - i1 < 8) throw std::invalid_argument("weighted_flux_difference: span too small");
  const auto rz = deriv1_o4(p.r, h);
  auto flux = [&](int i) {
    const double z = p.grid.node(i), r = p.r[i];
    return 2.0 * M_PI * r * std::exp(-(r * r + z * z) / 4.0) * (r * rz[i] + z) /
           std::sqrt(1.0 + rz[i] * rz[i]);
  };
  std::vector<double> band(i2 - i1 + 1);
  for (int i = i1; i <= i2; ++i) {
    const double z = p.grid.node(i), r = p.r[i];
    const double x2 = r * r + z * z;
    band[i - i1] = 2.0 * M_PI * r * std::sqrt(1.0 + rz[i] * rz[i]) * std::exp(-x2 / 4.0) *
                   (2.0 - x2 / 2.0);
  }
  return flux(i2) - flux(i1) - simpson(band, h);
}

}  // namespace mcflab
