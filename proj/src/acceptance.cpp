#include "mcflab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "mcflab/dynamics.hpp"
#include "mcflab/geometry.hpp"
#include "mcflab/neck.hpp"
#include "mcflab/solitons.hpp"
#include "mcflab/spectral.hpp"

namespace mcflab {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// ---- 01: eigenstructure of L ------------------------------------------------

CheckResult check_eigenstructure() {
  Timer timer;
  const Grid1D zgrid = Grid1D::linspace(-12.0, 12.0, 2401);  // h = 0.01
  const int ntheta = 2048;
  HermiteFourierBasis basis{4, 3};
  double worst = 0.0;
  std::string worst_mode;
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 3; ++m)
      for (int par = 0; par <= (m == 0 ? 0 : 1); ++par) {
        const auto phi = basis.sample(n, m, par, zgrid, ntheta);
        const double rq = rayleigh_quotient(phi);
        const double err = std::abs(rq - eigenvalue(n, m));
        if (err > worst) {
          worst = err;
          worst_mode = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
        }
      }
  CheckResult r;
  r.name = "01.eigenstructure";
  r.anchor = "eigenvalues 1-(n+m^2)/2";
  r.measured = worst;
  r.tolerance = 1e-4;
  r.pass = worst <= r.tolerance;
  r.details = "worst mode " + worst_mode;
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 02: quadratic-form signs ----------------------------------------------

CheckResult check_quadratic_forms() {
  Timer timer;
  const Grid1D zgrid = Grid1D::linspace(-12.0, 12.0, 1201);  // h = 0.02
  const int ntheta = 2048;
  HermiteFourierBasis basis{4, 3};
  auto normalized_sample = [&](int n, int m, int p) {
    auto g = basis.sample(n, m, p, zgrid, ntheta);
    const double nr = std::sqrt(norm2(g));
    for (auto& v : g.u) v /= nr;
    return g;
  };
  auto combo = [&](const std::vector<std::array<int, 3>>& modes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    CylinderGraph g = make_cylinder_graph(zgrid.lo, zgrid.hi, zgrid.n, ntheta);
    for (const auto& mo : modes) {
      const auto phi = normalized_sample(mo[0], mo[1], mo[2]);
      const double w = unif(rng);
      for (size_t k = 0; k < g.u.size(); ++k) g.u[k] += w * phi.u[k];
    }
    const double nr = std::sqrt(norm2(g));
    for (auto& v : g.u) v /= nr;
    return g;
  };
  std::mt19937_64 rng(20260810ULL);
  const double tol = 1e-6;
  double worst = 0.0;
  // H_plus: <Lf,f> >= 1/2 ||f||^2
  for (const auto& mo : std::vector<std::array<int, 3>>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 1}}) {
    const auto f = normalized_sample(mo[0], mo[1], mo[2]);
    worst = std::max(worst, 0.5 - inner_product(apply_L(f), f));
  }
  {
    const auto f = combo({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 1}}, rng);
    worst = std::max(worst, 0.5 - inner_product(apply_L(f), f));
  }
  // H_zero: <Lf,f> = 0
  for (const auto& mo : std::vector<std::array<int, 3>>{{2, 0, 0}, {1, 1, 0}, {1, 1, 1}}) {
    const auto f = normalized_sample(mo[0], mo[1], mo[2]);
    worst = std::max(worst, std::abs(inner_product(apply_L(f), f)));
  }
  {
    const auto f = combo({{2, 0, 0}, {1, 1, 0}, {1, 1, 1}}, rng);
    worst = std::max(worst, std::abs(inner_product(apply_L(f), f)));
  }
  // H_minus: <Lf,f> <= -1/2 ||f||^2
  for (const auto& mo : std::vector<std::array<int, 3>>{{3, 0, 0}, {4, 0, 0}, {0, 2, 0}, {2, 1, 0}, {0, 3, 1}}) {
    const auto f = normalized_sample(mo[0], mo[1], mo[2]);
    worst = std::max(worst, inner_product(apply_L(f), f) + 0.5);
  }
  {
    const auto f = combo({{3, 0, 0}, {0, 2, 0}, {2, 1, 0}}, rng);
    worst = std::max(worst, inner_product(apply_L(f), f) + 0.5);
  }
  CheckResult r;
  r.name = "02.quadratic_forms";
  r.anchor = "<Lf,f> >= ||f||^2/2 on H_+";
  r.measured = worst;
  r.tolerance = tol;
  r.pass = worst <= tol;
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 03: cylinder law -------------------------------------------------------

CheckResult check_cylinder_law() {
  Timer timer;
  FlowState s{-1.0, make_cylinder(kSqrt2, -6.0, 6.0, 241)};
  StepParams prm;
  prm.dt = 1e-4;
  prm.scheme = Scheme::explicit_rk4;
  prm.boundary = Boundary::extrapolated;
  const auto traj = evolve(s, prm, -0.1, {{"r_mid", default_probe("r_mid")}}, 1000);
  double worst = 0.0;
  const auto& rm = traj.diagnostics.at("r_mid");
  for (size_t k = 0; k < rm.size(); ++k)
    worst = std::max(worst, std::abs(rm[k] * rm[k] + 2.0 * traj.diag_times[k]));
  CheckResult r;
  r.name = "03.cylinder_law";
  r.anchor = "r_t = r_zz/(1+r_z^2) - 1/r";
  r.measured = worst;
  r.tolerance = 1e-8;
  r.pass = worst <= r.tolerance;
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 04: bowl translation ---------------------------------------------------

CheckResult check_bowl_translation() {
  Timer timer;
  const auto bowl = solve_bowl(1.0, 20.0, 1e-3);
  FlowState s{0.0, bowl.profile};
  StepParams prm;
  prm.dt = 1e-3;
  prm.scheme = Scheme::semi_implicit;
  prm.boundary = Boundary::extrapolated;
  const auto traj = evolve(s, prm, 1.0, {}, 100);  // states every 0.1
  double sup_err = 0.0;
  const auto& f0 = as_graph(traj.states.front()).f;
  for (const auto& st : traj.states) {
    const auto& f = as_graph(st).f;
    for (size_t i = 0; i + 1 < f.size(); ++i)
      sup_err = std::max(sup_err, std::abs(f[i] - f0[i] - st.t));
  }
  const auto rep = harnack_checks(traj);
  const double h_err = std::max({std::abs(rep.min_ftt), std::abs(rep.max_ftt),
                                 std::abs(rep.min_ftr), std::abs(rep.max_ftr)});
  const double ft_err = std::max(std::abs(rep.min_ft - 1.0), std::abs(rep.max_ft - 1.0));
  CheckResult r;
  r.name = "04.bowl_translation";
  r.anchor = "translating soliton; f_tt, f_tr >= 0; f_t >= tip speed";
  r.measured = std::max({sup_err, h_err, ft_err});
  r.details = "sup|f-f0-t|=" + fmt(sup_err) + " ftt/ftr=" + fmt(h_err) + " ft-1=" + fmt(ft_err) +
              " residual=" + fmt(bowl.residual_max);
  r.tolerance = 1e-3;
  r.pass = sup_err <= 1e-3 && h_err <= 1e-4 && ft_err <= 1e-4 && bowl.residual_max <= 1e-8;
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 05: rr_z limit and neck bound -----------------------------------------

CheckResult check_rrz() {
  Timer timer;
  const auto bowl = solve_bowl(1.0, 40.0, 1e-3);
  const double zlo = catmull_rom(bowl.profile.f, 0.0, bowl.profile.grid.h(), 5.0);
  const double zhi = bowl.profile.f.back() - 1.0;
  const auto radial = graph_to_radial(bowl.profile, Grid1D::linspace(zlo, zhi, 2401));
  const auto rep = rrz_profile(radial, 1.0);
  const double limit_err = std::abs(rep.limit - 1.0);
  const bool neck_bound = rep.has_neck && rep.neck_max <= 1.1;
  CheckResult r;
  r.name = "05.rrz_limit";
  r.anchor = "lim r r_z = 1/H; r r_z <= (1+2 eps0)/H on necks";
  r.measured = limit_err;
  r.tolerance = 0.02;
  r.pass = limit_err <= 0.02 && neck_bound;
  r.details = "limit=" + fmt(rep.limit) + " neck_max=" + fmt(rep.neck_max);
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 06: shrinker suite -----------------------------------------------------

CheckResult check_shrinkers() {
  Timer timer;
  CheckResult r;
  r.name = "06.shrinker_suite";
  r.anchor = "H = <x,nu>/2 caps: residual, concavity, u_a(2), lower bound";
  r.tolerance = 1e-6;
  r.pass = true;
  double worst_res = 0.0;
  std::string det;
  for (double a : {5.0, 10.0, 20.0}) {
    const double h = 1e-3 * a;
    const auto s = solve_shrinker(a, h);
    const double res = shrinker_profile_residual(s, a - 10.0 * h);
    worst_res = std::max(worst_res, res);
    if (res > 1e-6) r.pass = false;
    // discrete concavity
    const double hh = s.ygrid.h();
    double conc = -1e300;
    for (int i = 1; i + 1 < s.ygrid.n; ++i)
      conc = std::max(conc, (s.u[i + 1] - 2 * s.u[i] + s.u[i - 1]) / (hh * hh));
    if (conc > 10.0 * h) r.pass = false;
    // u_a(2) <= sqrt2 - a^-2 + 1e-4
    const double u2 = s.radius_at(2.0);
    if (u2 > kSqrt2 - 1.0 / (a * a) + 1e-4) r.pass = false;
    // lower bound on [0, a - 10h]
    double lb_margin = 1e300;
    for (int i = 0; i < s.ygrid.n; ++i) {
      const double y = s.ygrid.node(i);
      if (y > a - 10.0 * h) break;
      const double ell = std::sqrt(std::max(0.0, 2.0 * (1.0 - y * y / (a * a))));
      lb_margin = std::min(lb_margin, s.u[i] - ell);
    }
    if (lb_margin < -1e-3) r.pass = false;
    det += "a=" + fmt(a) + ":res=" + fmt(res) + ",conc=" + fmt(conc) + ",u2=" + fmt(u2) +
           ",lb=" + fmt(lb_margin) + " ";
  }
  r.measured = worst_res;
  r.details = det;
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 07: Gaussian-area monotonicity ----------------------------------------

CheckResult check_area_monotonicity() {
  Timer timer;
  const Grid1D zgrid = Grid1D::linspace(-12.0, 12.0, 481);
  const int ntheta = 64;
  CylinderGraph u0 = make_cylinder_graph(zgrid.lo, zgrid.hi, zgrid.n, ntheta);
  std::mt19937_64 rng(4242ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  HermiteFourierBasis basis{4, 3};
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 3; ++m)
      for (int p = 0; p <= (m == 0 ? 0 : 1); ++p) {
        const auto phi = basis.sample(n, m, p, zgrid, ntheta);
        const double supv = max_abs(phi.u);
        const double w = unif(rng) / supv;  // sup-normalized mode mix
        for (size_t k = 0; k < u0.u.size(); ++k) u0.u[k] += 1e-3 * w * phi.u[k];
      }
  FlowState s{0.0, u0};
  StepParams prm;
  prm.dt = 1e-3;
  prm.scheme = Scheme::explicit_rk4;
  const auto traj = evolve(s, prm, 2.0, {{"gaussian_area", default_probe("gaussian_area")}}, 2000);
  const auto& area = traj.diagnostics.at("gaussian_area");
  double worst_increase = -1e300;
  for (size_t k = 1; k < area.size(); ++k)
    worst_increase = std::max(worst_increase, area[k] - area[k - 1]);
  CheckResult r;
  r.name = "07.gaussian_area_monotone";
  r.anchor = "weighted area monotone decreasing in tau";
  r.measured = worst_increase;
  r.tolerance = 1e-6;
  r.pass = worst_increase <= 1e-6;
  r.details = "area " + fmt(area.front()) + " -> " + fmt(area.back());
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 08: linear-rate spectroscopy ------------------------------------------

CheckResult check_spectroscopy() {
  Timer timer;
  const Grid1D zgrid = Grid1D::linspace(-12.0, 12.0, 481);
  const int ntheta = 96;
  HermiteFourierBasis basis{4, 3};
  const std::vector<std::array<int, 2>> modes{{0, 0}, {1, 0}, {0, 1}, {2, 0},
                                              {1, 1}, {3, 0}, {0, 2}};
  double worst = 0.0;
  std::string det;
  for (const auto& mo : modes) {
    const auto phi = basis.sample(mo[0], mo[1], 0, zgrid, ntheta);
    CylinderGraph u0 = phi;
    const double scale = 1e-4 / max_abs(phi.u);
    for (auto& v : u0.u) v *= scale;
    FlowState s{0.0, u0};
    StepParams prm;
    prm.dt = 2e-3;
    prm.scheme = Scheme::semi_implicit;
    const auto traj = evolve(s, prm, 1.2, {}, 50);  // states every 0.1
    std::vector<double> taus, logs;
    for (const auto& st : traj.states) {
      if (st.t < 0.15) continue;  // skip the initial transient
      const auto mc = project_modes(as_cylinder(st), 4, 3);
      const double c = mc.at(mo[0], mo[1], 0);
      if (std::abs(c) < 1e-300) continue;
      taus.push_back(st.t);
      logs.push_back(std::log(std::abs(c)));
    }
    const auto fit = fit_line(taus, logs);
    const double err = std::abs(fit.slope - eigenvalue(mo[0], mo[1]));
    worst = std::max(worst, err);
    det += "(" + std::to_string(mo[0]) + "," + std::to_string(mo[1]) + "):" + fmt(fit.slope) + " ";
  }
  CheckResult r;
  r.name = "08.spectroscopy";
  r.anchor = "mode rates e^{(1-(n+m^2)/2) tau}";
  r.measured = worst;
  r.tolerance = 0.02;
  r.pass = worst <= 0.02;
  r.details = det;
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 09: Merle-Zaag dichotomy ----------------------------------------------

CheckResult check_merle_zaag() {
  Timer timer;
  int undecided = 0, plus = 0, zero = 0;
  std::mt19937_64 init_rng(42ULL);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  for (int run = 0; run < 100; ++run) {
    MZParams prm;
    prm.coupling_amplitude = 0.1;
    prm.seed = 42000ULL + run;
    MZState init;
    init.tau = -3100.0;
    init.U_plus = unif(init_rng);
    init.U_zero = unif(init_rng);
    init.U_minus = unif(init_rng);
    const auto traj = mz_simulate(prm, init, -3000.0, 2e-3);
    const auto cls = mz_classify(traj);
    if (cls.verdict == MZClass::undecided) ++undecided;
    if (cls.verdict == MZClass::plus_dominant) ++plus;
    if (cls.verdict == MZClass::zero_dominant) ++zero;
  }
  CheckResult r;
  r.name = "09.merle_zaag";
  r.anchor = "either U_0+U_- << U_+ or U_++U_- << U_0";
  r.measured = undecided;
  r.tolerance = 0.0;
  r.pass = undecided == 0;
  r.details = "plus=" + std::to_string(plus) + " zero=" + std::to_string(zero) +
              " undecided=" + std::to_string(undecided);
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 10: neck improvement ---------------------------------------------------

CheckResult check_neck_improvement() {
  Timer timer;
  const std::vector<std::vector<ModeTerm>> dictionary{
      {{2, 0, 0, 1.0}},          // pure m=2
      {{2, 1, 0, 1.0}},          // m=2 affine profile
      {{3, 0, 0, 1.0}},          // m=3
      {{4, 0, 1, 1.0}},          // m=4 (sin branch)
      {{1, 0, 0, 0.7}, {1, 1, 0, 0.7}},  // m=1 affine (absorbable)
  };
  double worst_res = 0.0;
  std::map<double, double> worst_factor;
  std::string det;
  for (double L : {10.0, 20.0, 40.0}) {
    double wf = 0.0;
    for (const auto& mix : dictionary) {
      const auto res = neck_improvement_experiment(L, 1e-3, mix);
      wf = std::max(wf, res.factor);
      worst_res = std::max(worst_res, res.vhat_heat_residual);
    }
    worst_factor[L] = wf;
    det += "L=" + fmt(L) + ":factor=" + fmt(wf) + " ";
  }
  const bool monotone = worst_factor[10.0] >= worst_factor[20.0] - 1e-9 &&
                        worst_factor[20.0] >= worst_factor[40.0] - 1e-9;
  CheckResult r;
  r.name = "10.neck_improvement";
  r.anchor = "boundary eps-symmetry improves to eps/2 at the center";
  r.measured = worst_factor[20.0];
  r.tolerance = 0.5;
  r.pass = worst_factor[20.0] <= 0.5 && monotone && worst_res <= 1e-6;
  r.details = det + "vhat_res=" + fmt(worst_res);
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 11: psi barrier ----------------------------------------------------------

CheckResult check_psi() {
  Timer timer;
  double worst_match = 0.0, worst_heat = 0.0, worst_zz = -1e300;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double z = 1e-2 * std::pow(50.0 / 1e-2, i / 19.0);
      const double t = 1e-2 * std::pow(100.0 / 1e-2, j / 19.0);
      worst_match = std::max(worst_match, std::abs(psi(z, t) - psi_defining_integral(z, t)));
      worst_heat = std::max(worst_heat, psi_heat_residual(z, t));
      worst_zz = std::max(worst_zz, psi_zz(z, t));
    }
  const double lim1 = std::abs(psi(50.0, 1.0) - 1.0);
  const double lim2 = std::abs(psi(1e-8, 1.0));
  const double lim3 = std::abs(psi(1.0, 1e-8) - 1.0);
  const double lim4 = std::abs(psi(1.0, 1e14));
  const double worst_lim = std::max({lim1, lim2, lim3, lim4});
  CheckResult r;
  r.name = "11.psi_barrier";
  r.anchor = "psi solves the heat equation, psi_zz < 0, four limits";
  r.measured = worst_match;
  r.tolerance = 1e-10;
  r.pass = worst_match <= 1e-10 && worst_zz < 0.0 && worst_heat <= 1e-6 && worst_lim <= 1e-7;
  r.details = "match=" + fmt(worst_match) + " heat=" + fmt(worst_heat) +
              " zz_max=" + fmt(worst_zz) + " limits=" + fmt(worst_lim);
  r.runtime_s = timer.seconds();
  return r;
}

// shared with 12/13: the capped-cylinder barrier run
struct BarrierRun {
  Trajectory outer;
  ShrinkerProfile shrinker;
  double K = 0.02;
};

BarrierRun barrier_run() {
  BarrierRun br;
  br.shrinker = solve_shrinker(10.0, 0.01);
  // capped cylinder, truncated before the cap tip (radius stays positive)
  const double R = kSqrt2 + 0.1, zcap = 4.0;
  const int n = 801;
  RadialProfile outer{Grid1D::linspace(-12.0, zcap + 0.9 * R, n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double z = outer.grid.node(i);
    outer.r[i] = (z <= zcap) ? R : std::sqrt(R * R - (z - zcap) * (z - zcap));
  }
  FlowState s{-1.0, outer};
  StepParams prm;
  prm.dt = 2e-4;
  prm.scheme = Scheme::semi_implicit;
  prm.boundary = Boundary::fixed_value;
  br.outer = evolve(s, prm, -0.25, {}, 250);  // states every 0.05
  return br;
}

// ---- 12: Brunn-Minkowski concavity -------------------------------------------

CheckResult check_cross_section_concavity(const BarrierRun& br) {
  Timer timer;
  double worst = 0.0;
  double tol = 0.0;
  for (const auto& st : br.outer.states) {
    const auto& p = as_radial(st);
    worst = std::max(worst, cross_section_sqrt_area(p).concavity_violation);
    tol = 10.0 * p.grid.h() * p.grid.h();
  }
  bool pass = worst <= tol;
  // also the solved soliton profiles
  {
    const auto rad = br.shrinker.to_radial();
    const double v = cross_section_sqrt_area(rad).concavity_violation;
    if (v > 10.0 * rad.grid.h() * rad.grid.h()) pass = false;
    worst = std::max(worst, v);
  }
  {
    const auto bowl = solve_bowl(1.0, 20.0, 1e-3);
    const auto rad = graph_to_radial(
        bowl.profile, Grid1D::linspace(bowl.profile.f[2000], bowl.profile.f.back() - 1.0, 1001));
    const double v = cross_section_sqrt_area(rad).concavity_violation;
    if (v > 10.0 * rad.grid.h() * rad.grid.h()) pass = false;
    worst = std::max(worst, v);
  }
  CheckResult r;
  r.name = "12.sqrtA_concavity";
  r.anchor = "z -> sqrt(A(z)) concave for convex bodies";
  r.measured = worst;
  r.tolerance = tol;
  r.pass = pass;
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 13: avoidance / containment ---------------------------------------------

CheckResult check_containment(const BarrierRun& br) {
  Timer timer;
  const double a = 10.0, K = br.K;
  double min_margin = 1e300;
  for (const auto& st : br.outer.states) {
    const double t = st.t, sq = std::sqrt(-t);
    // inner barrier: (-t)^{1/2} Sigma_a + (0,0,K a^2), restricted to the
    // paper's region x3 <= K a^2 - 2 sqrt(-t)
    const double zhi = K * a * a - 2.0 * sq;
    const double zlo = K * a * a - (a - 0.05 * a) * sq;
    const int n = 401;
    RadialProfile inner{Grid1D::linspace(zlo, zhi, n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
      const double y = (K * a * a - inner.grid.node(i)) / sq;
      inner.r[i] = sq * br.shrinker.radius_at(y);
    }
    const auto res = surface_containment(inner, as_radial(st));
    min_margin = std::min(min_margin, res.margin);
  }
  CheckResult r;
  r.name = "13.containment";
  r.anchor = "shrinker barrier stays inside the flow";
  r.measured = min_margin;
  r.tolerance = 0.0;
  r.pass = min_margin > 0.0;
  r.details = "min margin " + fmt(min_margin);
  r.runtime_s = timer.seconds();
  return r;
}

// ---- 14: <K,nu> evolution identity -------------------------------------------

CheckResult check_K_nu_identity() {
  Timer timer;
  auto cylinder_traj = [&](double h, double dt) {
    const int n = static_cast<int>(std::round(6.0 / h)) + 1;
    Trajectory traj;
    for (int k = 0; k < 3; ++k) {
      const double t = -1.0 + k * dt;
      traj.states.push_back({t, make_cylinder(std::sqrt(-2.0 * t), -3.0, 3.0, n)});
    }
    return traj;
  };
  const RotationField K = RotationField::from_tilt_offset(1e-2, 0.0, 0.0, 0.0);
  const double res1 = K_nu_evolution_residual(cylinder_traj(1e-2, 1e-4), K);
  const double res2 = K_nu_evolution_residual(cylinder_traj(5e-3, 5e-5), K);
  // bowl trajectory from the exact translation of the solved profile
  const auto bowl = solve_bowl(1.0, 25.0, 1e-3);
  auto bowl_traj = [&](double h, double dt) {
    auto inv = MonotoneCubic::fit(bowl.profile.f, bowl.profile.grid.nodes());
    Trajectory traj;
    const double zlo = 30.0, zhi = 100.0;
    const int n = static_cast<int>(std::round((zhi - zlo) / h)) + 1;
    for (int k = 0; k < 3; ++k) {
      const double t = k * dt;
      RadialProfile p{Grid1D::linspace(zlo, zhi, n), std::vector<double>(n)};
      for (int i = 0; i < n; ++i) p.r[i] = inv(p.grid.node(i) - t);
      traj.states.push_back({t, p});
    }
    return traj;
  };
  const double res_bowl = K_nu_evolution_residual(bowl_traj(1e-2, 1e-4), K);
  CheckResult r;
  r.name = "14.K_nu_identity";
  r.anchor = "d/dt <K,nu> = Lap <K,nu> + |A|^2 <K,nu>";
  r.measured = std::max(res1, res_bowl);
  r.tolerance = 1e-3;
  r.pass = res1 <= 1e-3 && res_bowl <= 1e-3 && res2 <= 0.6 * res1;
  r.details = "cyl=" + fmt(res1) + " refined=" + fmt(res2) + " bowl=" + fmt(res_bowl);
  r.runtime_s = timer.seconds();
  return r;
}

}  // namespace

std::vector<CheckResult> run_primary_suite(const std::vector<int>& only) {
  auto want = [&](int k) {
    return only.empty() || std::find(only.begin(), only.end(), k) != only.end();
  };
  std::vector<CheckResult> out;
  if (want(1)) out.push_back(check_eigenstructure());
  if (want(2)) out.push_back(check_quadratic_forms());
  if (want(3)) out.push_back(check_cylinder_law());
  if (want(4)) out.push_back(check_bowl_translation());
  if (want(5)) out.push_back(check_rrz());
  if (want(6)) out.push_back(check_shrinkers());
  if (want(7)) out.push_back(check_area_monotonicity());
  if (want(8)) out.push_back(check_spectroscopy());
  if (want(9)) out.push_back(check_merle_zaag());
  if (want(10)) out.push_back(check_neck_improvement());
  if (want(11)) out.push_back(check_psi());
  if (want(12) || want(13)) {
    const auto br = barrier_run();
    if (want(12)) out.push_back(check_cross_section_concavity(br));
    if (want(13)) out.push_back(check_containment(br));
  }
  if (want(14)) out.push_back(check_K_nu_identity());
  return out;
}

}  // namespace mcflab
