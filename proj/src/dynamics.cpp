#include "mcflab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace mcflab {

std::vector<MZState> mz_simulate(const MZParams& p, const MZState& init, double tau_end,
                                 double dt) {
  if (!(dt > 0.0) || dt > 0.01) throw std::invalid_argument("mz_simulate: need 0 < dt <= 0.01");
  if (!(tau_end > init.tau)) throw std::invalid_argument("mz_simulate: tau_end > tau0");
  if (init.U_plus < 0 || init.U_zero < 0 || init.U_minus < 0)
    throw std::invalid_argument("mz_simulate: components must be >= 0");
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const long steps = std::lround((tau_end - init.tau) / dt);
  std::vector<MZState> out;
  out.reserve(steps + 1);
  out.push_back(init);
  MZState s = init;
  for (long k = 0; k < steps; ++k) {
    const double ap = unif(rng), a0 = unif(rng), am = unif(rng);
    auto rhs = [&](const MZState& q) {
      const double eps = mz_coupling(p, q.tau);
      const double S = q.U_plus + q.U_zero + q.U_minus;
      return MZState{1.0, q.U_plus + ap * eps * S, a0 * eps * S, -q.U_minus + am * eps * S};
    };
    auto axpy = [](const MZState& q, double h, const MZState& d) {
      return MZState{q.tau + h * d.tau, q.U_plus + h * d.U_plus, q.U_zero + h * d.U_zero,
                     q.U_minus + h * d.U_minus};
    };
    const MZState k1 = rhs(s);
    const MZState k2 = rhs(axpy(s, dt / 2, k1));
    const MZState k3 = rhs(axpy(s, dt / 2, k2));
    const MZState k4 = rhs(axpy(s, dt, k3));
    s.tau += dt;
    s.U_plus += dt / 6 * (k1.U_plus + 2 * k2.U_plus + 2 * k3.U_plus + k4.U_plus);
    s.U_zero += dt / 6 * (k1.U_zero + 2 * k2.U_zero + 2 * k3.U_zero + k4.U_zero);
    s.U_minus += dt / 6 * (k1.U_minus + 2 * k2.U_minus + 2 * k3.U_minus + k4.U_minus);
    s.U_plus = std::max(0.0, s.U_plus);
    s.U_zero = std::max(0.0, s.U_zero);
    s.U_minus = std::max(0.0, s.U_minus);
    out.push_back(s);
    if (s.U_plus > 1e300 || s.U_zero > 1e300 || s.U_minus > 1e300) break;  // overflow stop
  }
  return out;
}

namespace {
double safe_ratio(double num, double den) {
  if (den <= 1e-290) return (num <= 1e-290) ? 0.0 : 1e300;
  return num / den;
}
}  // namespace

MZClassification mz_classify(const std::vector<MZState>& traj) {
  if (traj.size() < 100) throw std::invalid_argument("mz_classify: need >= 100 samples");
  const size_t n = traj.size(), start = n - n / 3;
  std::vector<double> tau, r_plus, r_zero;
  for (size_t k = start; k < n; ++k) {
    tau.push_back(traj[k].tau);
    r_plus.push_back(safe_ratio(traj[k].U_zero + traj[k].U_minus, traj[k].U_plus));
    r_zero.push_back(safe_ratio(traj[k].U_plus + traj[k].U_minus, traj[k].U_zero));
  }
  MZClassification out;
  out.final_ratio_plus = r_plus.back();
  out.final_ratio_zero = r_zero.back();
  auto passes = [&](const std::vector<double>& ratio, double* slope) {
    const auto fit = fit_line(tau, ratio);
    *slope = fit.slope;
    // a ratio at its stochastic floor has a coin-toss slope; accept slopes
    // that are not significantly positive
    return ratio.back() < 1e-3 && fit.slope <= 3.0 * fit.slope_stderr + 1e-12;
  };
  double sp = 0, sz = 0;
  const bool plus_ok = passes(r_plus, &sp);
  const bool zero_ok = passes(r_zero, &sz);
  if (plus_ok && !zero_ok) {
    out.verdict = MZClass::plus_dominant;
    out.slope = sp;
  } else if (zero_ok && !plus_ok) {
    out.verdict = MZClass::zero_dominant;
    out.slope = sz;
  } else if (plus_ok && zero_ok) {
    // degenerate tiny trajectories: pick the smaller final ratio
    out.verdict = (r_plus.back() <= r_zero.back()) ? MZClass::plus_dominant
                                                   : MZClass::zero_dominant;
    out.slope = (r_plus.back() <= r_zero.back()) ? sp : sz;
  }
  return out;
}

double psi(double z, double t) {
  if (!(z > 0.0) || !(t > 0.0)) throw std::domain_error("psi: z > 0 and t > 0 required");
  return std::erf(z / (2.0 * std::sqrt(t)));
}

double psi_zz(double z, double t) {
  if (!(z > 0.0) || !(t > 0.0)) throw std::domain_error("psi_zz: z > 0 and t > 0 required");
  const double st = std::sqrt(t);
  return -z / (2.0 * t * st * std::sqrt(M_PI)) * std::exp(-z * z / (4.0 * t));
}

double psi_defining_integral(double z, double t, double tol) {
  if (!(z > 0.0) || !(t > 0.0))
    throw std::domain_error("psi_defining_integral: z > 0 and t > 0 required");
  const double st = std::sqrt(t);
  auto integrand = [&](double y) {
    return std::exp(-(z - y) * (z - y) / (4.0 * t)) - std::exp(-(z + y) * (z + y) / (4.0 * t));
  };
  // integrand support: a Gaussian of width ~ 2 sqrt(t) around y = z
  const double y_hi = z + 30.0 * st;
  const double val = adaptive_simpson(integrand, 0.0, y_hi, tol * std::sqrt(4.0 * M_PI * t));
  return val / std::sqrt(4.0 * M_PI * t);
}

double psi_heat_residual(double z, double t) {
  const double hz = 1e-3 * std::max(z, std::sqrt(t));
  const double ht = 1e-3 * t;
  auto pz = [&](double dz) { return psi(z + dz, t); };
  auto pt = [&](double dt) { return psi(z, t + dt); };
  const double psizz = (-pz(2 * hz) + 16 * pz(hz) - 30 * pz(0) + 16 * pz(-hz) - pz(-2 * hz)) /
                       (12.0 * hz * hz);
  const double psit =
      (-pt(2 * ht) + 8 * pt(ht) - 8 * pt(-ht) + pt(-2 * ht)) / (12.0 * ht);
  return std::abs(psit - psizz);
}

HarnackReport harnack_checks(const Trajectory& traj) {
  const auto& states = traj.states;
  if (states.size() < 3) throw std::invalid_argument("harnack_checks: need >= 3 states");
  const double dt = states[1].t - states[0].t;
  for (size_t k = 1; k < states.size(); ++k)
    if (std::abs(states[k].t - states[k - 1].t - dt) > 1e-9 * std::abs(dt))
      throw std::invalid_argument("harnack_checks: nonuniform time spacing");
  const int n = as_graph(states[0]).grid.n;
  const double h = as_graph(states[0]).grid.h();
  HarnackReport rep;
  rep.min_ftt = rep.min_ftr = rep.min_ft = 1e300;
  rep.max_ftt = rep.max_ftr = rep.max_ft = -1e300;
  std::vector<double> tip_speeds;
  for (size_t k = 1; k + 1 < states.size(); ++k) {
    const auto& fm = as_graph(states[k - 1]).f;
    const auto& f0 = as_graph(states[k]).f;
    const auto& fp = as_graph(states[k + 1]).f;
    std::vector<double> ft(n), ftt(n);
    for (int i = 0; i < n; ++i) {
      ft[i] = (fp[i] - fm[i]) / (2.0 * dt);
      ftt[i] = (fp[i] - 2.0 * f0[i] + fm[i]) / (dt * dt);
    }
    const auto ftr = deriv1(ft, h);
    // skip the outflow-boundary node: its one-sided stencil is first order
    for (int i = 0; i + 1 < n; ++i) {
      if (ft[i] < rep.min_ft) rep.min_ft = ft[i];
      if (ft[i] > rep.max_ft) rep.max_ft = ft[i];
      if (ftt[i] < rep.min_ftt) {
        rep.min_ftt = ftt[i];
        rep.worst_node_ftt = i;
      }
      rep.max_ftt = std::max(rep.max_ftt, ftt[i]);
      if (ftr[i] < rep.min_ftr) {
        rep.min_ftr = ftr[i];
        rep.worst_node_ftr = i;
      }
      rep.max_ftr = std::max(rep.max_ftr, ftr[i]);
    }
    tip_speeds.push_back(ft[0]);
  }
  const size_t q = std::max<size_t>(1, tip_speeds.size() / 4);
  double s = 0.0;
  for (size_t k = tip_speeds.size() - q; k < tip_speeds.size(); ++k) s += tip_speeds[k];
  rep.tip_speed = s / q;
  return rep;
}

RrzReport rrz_profile(const RadialProfile& p, double H_ref, double eps0) {
  p.validate();
  const double h = p.grid.h();
  const auto rz = deriv1_o4(p.r, h);
  RrzReport rep;
  rep.H_ref = H_ref;
  rep.rrz.resize(p.grid.n);
  for (int i = 0; i < p.grid.n; ++i) rep.rrz[i] = p.r[i] * rz[i];
  double zmax = -1e300;
  int imax = -1;
  for (int i = 0; i < p.grid.n; ++i) {
    if (std::abs(rz[i]) <= eps0 && p.r[i] > p.tip_threshold()) {
      rep.has_neck = true;
      rep.neck_max = std::max(rep.neck_max, rep.rrz[i]);
      if (p.grid.node(i) > zmax) {
        zmax = p.grid.node(i);
        imax = i;
      }
    }
  }
  if (!rep.has_neck) return rep;
  // two-point Richardson in 1/z: v(z) ~ v_inf + A/z, at z2 and z1 ~ z2/2
  const double z2 = p.grid.node(imax);
  const double z1 = std::max(p.grid.lo + 2 * h, z2 / 2.0);
  const int i1 = static_cast<int>(std::round((z1 - p.grid.lo) / h));
  const double v2 = rep.rrz[imax], v1 = rep.rrz[i1];
  const double z1n = p.grid.node(i1);
  rep.limit = (z2 * v2 - z1n * v1) / (z2 - z1n);
  return rep;
}

RzzDecay rzz_decay(const RadialProfile& p, double threshold_radius) {
  p.validate();
  const auto rzz = deriv2_o4(p.r, p.grid.h());
  RzzDecay d;
  d.C1 = threshold_radius;
  for (int i = 1; i + 1 < p.grid.n; ++i) {
    if (p.r[i] < threshold_radius) continue;
    d.C2 = std::max(d.C2, std::pow(p.r[i], 2.5) * (-rzz[i]));
  }
  return d;
}

}  // namespace mcflab
