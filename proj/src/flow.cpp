#include "mcflab/flow.hpp"

#include <algorithm>
#include <cmath>

namespace mcflab {

const RadialProfile& as_radial(const FlowState& s) {
  if (auto* p = std::get_if<RadialProfile>(&s.payload)) return *p;
  throw std::invalid_argument("FlowState: radial payload expected");
}
const GraphProfile& as_graph(const FlowState& s) {
  if (auto* p = std::get_if<GraphProfile>(&s.payload)) return *p;
  throw std::invalid_argument("FlowState: graph payload expected");
}
const CylinderGraph& as_cylinder(const FlowState& s) {
  if (auto* p = std::get_if<CylinderGraph>(&s.payload)) return *p;
  throw std::invalid_argument("FlowState: cylinder-graph payload expected");
}

namespace {

void check_explicit_cfl(double dt, double h, double factor) {
  if (dt > 0.5 * h * h * factor)
    throw std::invalid_argument("explicit scheme: dt exceeds 0.5 h^2 stability bound");
}

// Graph-form right side with tip rule and boundary handling.
std::vector<double> graph_rhs(const std::vector<double>& f, double h, Boundary bc) {
  const int n = static_cast<int>(f.size());
  std::vector<double> rhs(n);
  rhs[0] = 4.0 * (f[1] - f[0]) / (h * h);  // f_t(0) = 2 f_rr(0), even extension
  for (int i = 1; i + 1 < n; ++i) {
    const double fr = (f[i + 1] - f[i - 1]) / (2.0 * h);
    const double frr = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    rhs[i] = frr / (1.0 + fr * fr) + fr / (i * h);
  }
  const int m = n - 1;
  switch (bc) {
    case Boundary::fixed_value:
      rhs[m] = 0.0;
      break;
    case Boundary::extrapolated: {
      const double fr = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
      const double frr = (f[m] - 2.0 * f[m - 1] + f[m - 2]) / (h * h);  // shifted stencil
      rhs[m] = frr / (1.0 + fr * fr) + fr / (m * h);
      break;
    }
    case Boundary::reflect: {
      const double frr = 2.0 * (f[m - 1] - f[m]) / (h * h);
      rhs[m] = frr;  // f_r = 0 at a reflected end
      break;
    }
  }
  return rhs;
}

std::vector<double> radius_rhs(const std::vector<double>& r, double h, Boundary bc) {
  const int n = static_cast<int>(r.size());
  std::vector<double> rhs(n);
  auto interior = [&](int i, double rm, double r0, double rp) {
    const double rz = (rp - rm) / (2.0 * h);
    const double rzz = (rp - 2.0 * r0 + rm) / (h * h);
    return rzz / (1.0 + rz * rz) - 1.0 / r0;
  };
  for (int i = 1; i + 1 < n; ++i) rhs[i] = interior(i, r[i - 1], r[i], r[i + 1]);
  auto end = [&](int i, int s) {
    switch (bc) {
      case Boundary::fixed_value:
        return 0.0;
      case Boundary::extrapolated: {
        const double rz = s * (3.0 * r[i] - 4.0 * r[i + s] + r[i + 2 * s]) / (2.0 * h);
        const double rzz = (r[i] - 2.0 * r[i + s] + r[i + 2 * s]) / (h * h);
        return rzz / (1.0 + rz * rz) - 1.0 / r[i];
      }
      case Boundary::reflect: {
        const double rzz = 2.0 * (r[i + s] - r[i]) / (h * h);
        return rzz - 1.0 / r[i];
      }
    }
    return 0.0;
  };
  rhs[0] = end(0, 1);
  rhs[n - 1] = end(n - 1, -1);
  return rhs;
}

std::vector<double> rk4_lines(const std::vector<double>& y, double dt,
                              const std::function<std::vector<double>(const std::vector<double>&)>& F) {
  const size_t n = y.size();
  const auto k1 = F(y);
  std::vector<double> tmp(n);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  const auto k2 = F(tmp);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  const auto k3 = F(tmp);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  const auto k4 = F(tmp);
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Tridiagonal solve allowing one extra corner entry per boundary row:
// xu at (0, 2) and xl at (n-1, n-3), produced by shifted boundary stencils.
// The corners are eliminated against the neighboring rows first.
void solve_almost_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                              std::vector<double>& c, std::vector<double>& d,
                              double xu, double xl) {
  const int n = static_cast<int>(b.size());
  if (n >= 4) {
    if (xu != 0.0) {
      const double w = xu / c[1];
      b[0] -= w * a[1];
      c[0] -= w * b[1];
      d[0] -= w * d[1];
    }
    if (xl != 0.0) {
      const double w = xl / a[n - 2];
      a[n - 1] -= w * b[n - 2];
      b[n - 1] -= w * c[n - 2];
      d[n - 1] -= w * d[n - 2];
    }
  }
  solve_tridiagonal(a, b, c, d);
}

}  // namespace

FlowState step_graph(const FlowState& s, const StepParams& p) {
  const GraphProfile& g = as_graph(s);
  g.validate();
  const int n = g.grid.n;
  const double h = g.grid.h(), dt = p.dt;
  FlowState out = s;
  out.t = s.t + dt;
  GraphProfile& gn = std::get<GraphProfile>(out.payload);
  if (p.scheme == Scheme::explicit_rk4) {
    check_explicit_cfl(dt, h, p.stability_factor);
    gn.f = rk4_lines(g.f, dt, [&](const std::vector<double>& f) {
      return graph_rhs(f, h, p.boundary);
    });
    return out;
  }
  // semi-implicit: implicit f_rr and f_r/r with coefficients lagged
  const auto fr = deriv1(g.f, h);
  std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d = g.f;
  double xl = 0.0;
  b[0] = 1.0 + 4.0 * dt / (h * h);
  c[0] = -4.0 * dt / (h * h);
  for (int i = 1; i + 1 < n; ++i) {
    const double ai = 1.0 / (1.0 + fr[i] * fr[i]);
    const double bi = 1.0 / (i * h);
    a[i] = -dt * (ai / (h * h) - bi / (2.0 * h));
    b[i] = 1.0 + 2.0 * dt * ai / (h * h);
    c[i] = -dt * (ai / (h * h) + bi / (2.0 * h));
  }
  const int m = n - 1;
  switch (p.boundary) {
    case Boundary::fixed_value:
      break;  // identity row
    case Boundary::extrapolated: {
      const double ai = 1.0 / (1.0 + fr[m] * fr[m]);
      const double bi = 1.0 / (m * h);
      // f_rr by the shifted stencil (m, m-1, m-2); f_r one-sided second order
      b[m] = 1.0 - dt * (ai / (h * h) + 3.0 * bi / (2.0 * h));
      a[m] = -dt * (-2.0 * ai / (h * h) - 2.0 * bi / h);
      xl = -dt * (ai / (h * h) + bi / (2.0 * h));
      break;
    }
    case Boundary::reflect: {
      b[m] = 1.0 + 2.0 * dt / (h * h);
      a[m] = -2.0 * dt / (h * h);
      break;
    }
  }
  solve_almost_tridiagonal(a, b, c, d, 0.0, xl);
  gn.f = std::move(d);
  return out;
}

FlowState step_radius(const FlowState& s, const StepParams& p, ExtinctionEvent* event) {
  const RadialProfile& r = as_radial(s);
  r.validate();
  const int n = r.grid.n;
  const double h = r.grid.h(), dt = p.dt;
  FlowState out = s;
  out.t = s.t + dt;
  RadialProfile& rn = std::get<RadialProfile>(out.payload);
  if (p.scheme == Scheme::explicit_rk4) {
    check_explicit_cfl(dt, h, p.stability_factor);
    rn.r = rk4_lines(r.r, dt, [&](const std::vector<double>& v) {
      return radius_rhs(v, h, p.boundary);
    });
  } else {
    const auto rz = deriv1(r.r, h);
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n);
    double xu = 0.0, xl = 0.0;
    for (int i = 0; i < n; ++i) d[i] = r.r[i] - 2.0 * dt / r.r[i];
    for (int i = 1; i + 1 < n; ++i) {
      const double ai = 1.0 / (1.0 + rz[i] * rz[i]);
      a[i] = c[i] = -dt * ai / (h * h);
      b[i] = 1.0 + 2.0 * dt * ai / (h * h) - dt / (r.r[i] * r.r[i]);
    }
    switch (p.boundary) {
      case Boundary::fixed_value:
        d[0] = r.r[0];
        d[n - 1] = r.r[n - 1];
        break;
      case Boundary::extrapolated: {
        // shifted implicit end stencils r_zz(0) ~ (r0 - 2 r1 + r2)/h^2
        const double a0 = 1.0 / (1.0 + rz[0] * rz[0]);
        b[0] = 1.0 - dt * a0 / (h * h) - dt / (r.r[0] * r.r[0]);
        c[0] = 2.0 * dt * a0 / (h * h);
        xu = -dt * a0 / (h * h);
        const double am = 1.0 / (1.0 + rz[n - 1] * rz[n - 1]);
        b[n - 1] = 1.0 - dt * am / (h * h) - dt / (r.r[n - 1] * r.r[n - 1]);
        a[n - 1] = 2.0 * dt * am / (h * h);
        xl = -dt * am / (h * h);
        break;
      }
      case Boundary::reflect: {
        b[0] = 1.0 + 2.0 * dt / (h * h) - dt / (r.r[0] * r.r[0]);
        c[0] = -2.0 * dt / (h * h);
        b[n - 1] = 1.0 + 2.0 * dt / (h * h) - dt / (r.r[n - 1] * r.r[n - 1]);
        a[n - 1] = -2.0 * dt / (h * h);
        break;
      }
    }
    solve_almost_tridiagonal(a, b, c, d, xu, xl);
    rn.r = std::move(d);
  }
  // zero crossing -> report, do not apply
  for (int i = 0; i < n; ++i) {
    if (rn.r[i] <= 0.0 && r.r[i] > 0.0) {
      if (event) {
        event->occurred = true;
        event->node = i;
        event->time = s.t + dt * r.r[i] / std::max(r.r[i] - rn.r[i], 1e-300);
      }
      return s;
    }
  }
  return out;
}

FlowState step_rescaled(const FlowState& s, const StepParams& p) {
  const CylinderGraph& g = as_cylinder(s);
  g.validate();
  const int nt = g.ntheta, nz = g.nz();
  const double hz = g.zgrid.h(), ht = g.htheta(), dt = p.dt;

  auto grad_bound = [&](const CylinderGraph& cg) {
    double worst = 0.0;
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < nz; ++i) {
        const int jp = (j + 1) % nt, jm = (j + nt - 1) % nt;
        const double ut = (cg.at(jp, i) - cg.at(jm, i)) / (2.0 * ht);
        const double uz = (i == 0)      ? (cg.at(j, 1) - cg.at(j, 0)) / hz
                          : (i == nz - 1) ? (cg.at(j, i) - cg.at(j, i - 1)) / hz
                                          : (cg.at(j, i + 1) - cg.at(j, i - 1)) / (2.0 * hz);
        worst = std::max(worst, std::sqrt(uz * uz + ut * ut / (cg.rho(j, i) * cg.rho(j, i))));
      }
    return worst;
  };
  if (grad_bound(g) > 0.5)
    throw std::runtime_error("step_rescaled: graph bound |grad u| <= 0.5 violated");

  auto rhs = [&](const std::vector<double>& uvec) {
    CylinderGraph tmp = g;
    tmp.u = uvec;
    const auto geo = cylinder_graph_geometry(tmp);
    std::vector<double> out(uvec.size(), 0.0);
    for (int j = 0; j < nt; ++j)
      for (int i = 1; i + 1 < nz; ++i) {  // Dirichlet ends frozen
        const size_t k = static_cast<size_t>(j) * nz + i;
        out[k] = -(geo.H[k] - 0.5 * geo.x_dot_nu[k]) * geo.W[k] / tmp.rho(j, i);
      }
    return out;
  };

  FlowState out = s;
  out.t = s.t + dt;
  CylinderGraph& gn = std::get<CylinderGraph>(out.payload);
  if (p.scheme == Scheme::explicit_rk4) {
    const double lam = 4.0 / (hz * hz) + 2.0 / (ht * ht);  // theta coefficient ~ 1/rho^2
    if (dt * lam > 2.5 * p.stability_factor)
      throw std::invalid_argument("step_rescaled: dt exceeds the RK4 stability bound");
    gn.u = rk4_lines(g.u, dt, rhs);
  } else {
    // IMEX Euler: z-diffusion implicit along each theta line, remainder lagged
    const auto f0 = rhs(g.u);
    std::vector<double> a(nz), b(nz), c(nz), d(nz);
    for (int j = 0; j < nt; ++j) {
      for (int i = 0; i < nz; ++i) {
        const size_t k = static_cast<size_t>(j) * nz + i;
        if (i == 0 || i == nz - 1) {
          a[i] = c[i] = 0.0;
          b[i] = 1.0;
          d[i] = g.u[k];
          continue;
        }
        const double uz = (g.at(j, i + 1) - g.at(j, i - 1)) / (2.0 * hz);
        const double azz = 1.0 / (1.0 + uz * uz);  // leading z coefficient
        const double uzz = (g.at(j, i + 1) - 2.0 * g.at(j, i) + g.at(j, i - 1)) / (hz * hz);
        a[i] = c[i] = -dt * azz / (hz * hz);
        b[i] = 1.0 + 2.0 * dt * azz / (hz * hz);
        d[i] = g.u[k] + dt * (f0[k] - azz * uzz);
      }
      solve_tridiagonal(a, b, c, d);
      for (int i = 0; i < nz; ++i) gn.u[static_cast<size_t>(j) * nz + i] = d[i];
    }
  }
  return out;
}

Probe default_probe(const std::string& name) {
  if (name == "H_max") {
    return [](const FlowState& s) {
      if (auto* r = std::get_if<RadialProfile>(&s.payload)) {
        const auto c = curvature_radial(*r);
        const auto rz = deriv1(r->r, r->grid.h());
        double m = 0.0;
        for (int i = 1; i + 1 < r->grid.n; ++i)
          if (r->r[i] > r->tip_threshold() && std::abs(rz[i]) <= 2.0) m = std::max(m, c.H[i]);
        return m;
      }
      if (auto* g = std::get_if<GraphProfile>(&s.payload)) {
        const auto c = curvature_graph(*g);
        double m = 0.0;
        for (double v : c.H) m = std::max(m, v);
        return m;
      }
      const auto geo = cylinder_graph_geometry(as_cylinder(s));
      double m = 0.0;
      for (double v : geo.H) m = std::max(m, v);
      return m;
    };
  }
  if (name == "gaussian_area") {
    return [](const FlowState& s) {
      if (auto* r = std::get_if<RadialProfile>(&s.payload)) return gaussian_area(*r);
      return gaussian_area(as_cylinder(s));
    };
  }
  if (name == "r_min") {
    return [](const FlowState& s) {
      const auto& r = as_radial(s);
      return *std::min_element(r.r.begin(), r.r.end());
    };
  }
  if (name == "r_mid") {
    return [](const FlowState& s) {
      const auto& r = as_radial(s);
      return r.r[r.grid.n / 2];
    };
  }
  if (name == "tip_height") {
    return [](const FlowState& s) { return as_graph(s).f.front(); };
  }
  if (name == "u_maxabs") {
    return [](const FlowState& s) { return max_abs(as_cylinder(s).u); };
  }
  throw std::invalid_argument("default_probe: unknown probe " + name);
}

Trajectory evolve(const FlowState& s0, const StepParams& p, double t_end,
                  const ProbeList& probes, int state_stride) {
  if (!(t_end > s0.t)) throw std::invalid_argument("evolve: t_end > t0 required");
  if (state_stride < 1) throw std::invalid_argument("evolve: state_stride >= 1");
  const long steps = std::lround((t_end - s0.t) / p.dt);
  Trajectory traj;
  auto record = [&](const FlowState& s) {
    traj.diag_times.push_back(s.t);
    for (const auto& [name, probe] : probes) traj.diagnostics[name].push_back(probe(s));
  };
  FlowState cur = s0;
  traj.states.push_back(cur);
  record(cur);
  for (long k = 0; k < steps; ++k) {
    FlowState next;
    if (std::holds_alternative<GraphProfile>(cur.payload)) {
      next = step_graph(cur, p);
    } else if (std::holds_alternative<RadialProfile>(cur.payload)) {
      ExtinctionEvent ev;
      next = step_radius(cur, p, &ev);
      if (ev.occurred) {
        traj.status = "extinct";
        traj.extinction = ev;
        break;
      }
    } else {
      next = step_rescaled(cur, p);
    }
    cur = std::move(next);
    record(cur);
    if ((k + 1) % state_stride == 0 || k + 1 == steps) traj.states.push_back(cur);
  }
  return traj;
}

std::vector<double> extinction_profile(const Trajectory& traj) {
  if (traj.states.size() < 3)
    throw std::invalid_argument("extinction_profile: need >= 3 stored states");
  const size_t m = traj.states.size();
  const auto& p0 = as_radial(traj.states[m - 3]);
  const auto& p1 = as_radial(traj.states[m - 2]);
  const auto& p2 = as_radial(traj.states[m - 1]);
  const double t0 = traj.states[m - 3].t, t1 = traj.states[m - 2].t, t2 = traj.states[m - 1].t;
  const int n = p0.grid.n;
  std::vector<double> T(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i) {
    const double y0 = p0.r[i] * p0.r[i], y1 = p1.r[i] * p1.r[i], y2 = p2.r[i] * p2.r[i];
    // quadratic through (t0,y0),(t1,y1),(t2,y2), Newton form
    const double d01 = (y1 - y0) / (t1 - t0), d12 = (y2 - y1) / (t2 - t1);
    const double c2 = (d12 - d01) / (t2 - t0);
    const double c1 = d12 + c2 * (t2 - t1);  // derivative at t2
    const double y = y2;
    if (c1 >= 0.0 && y > 0.0) continue;  // not shrinking
    double root;
    if (std::abs(c2) < 1e-14 * std::max(1.0, std::abs(c1))) {
      root = t2 - y / c1;
    } else {
      // solve y + c1 s + c2 s^2 = 0 for s = t - t2, smallest positive root
      const double disc = c1 * c1 - 4.0 * c2 * y;
      if (disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      const double s1 = (-c1 - sq) / (2.0 * c2), s2 = (-c1 + sq) / (2.0 * c2);
      root = 1e300;
      if (s1 >= 0.0) root = std::min(root, t2 + s1);
      if (s2 >= 0.0) root = std::min(root, t2 + s2);
      if (root > 1e299) continue;
    }
    T[i] = root;
  }
  return T;
}

}  // namespace mcflab
