// mcflab -- command-line front end: soliton solvers, flow evolution, spectral
// splits, Merle-Zaag sweeps, the psi table, neck experiments, and the verify
// suite. Flat key=value config files merge under the flags.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mcflab/acceptance.hpp"
#include "mcflab/dynamics.hpp"
#include "mcflab/geometry.hpp"
#include "mcflab/io.hpp"
#include "mcflab/neck.hpp"
#include "mcflab/solitons.hpp"
#include "mcflab/spectral.hpp"

using namespace mcflab;

namespace {

// flat key=value file; '#' comments; flags take precedence (CLI11 default
// handling: config values are applied only where no flag was given)
void load_config(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::string line;
  std::vector<std::string> args;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    args.push_back("--" + line.substr(0, eq));
    args.push_back(line.substr(eq + 1));
  }
  std::vector<const char*> argv;
  argv.push_back("config");
  for (const auto& a : args) argv.push_back(a.c_str());
  app.parse(static_cast<int>(argv.size()), argv.data());
}

Metadata base_meta(std::uint64_t seed, const Metadata& extra) {
  Metadata m = extra;
  m["seed"] = std::to_string(seed);
  m["config_hash"] = config_hash(extra);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axisymmetric mean curvature flow laboratory"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "cap module-level parallelism");

  // ---- bowl ----
  auto* bowl_cmd = app.add_subcommand("bowl", "solve the translating bowl profile");
  double b_speed = 1.0, b_rmax = 20.0, b_h = 1e-3;
  std::string b_out = "bowl.csv";
  bowl_cmd->add_option("--speed", b_speed);
  bowl_cmd->add_option("--rmax", b_rmax);
  bowl_cmd->add_option("--h", b_h);
  bowl_cmd->add_option("--out", b_out);

  // ---- shrinker ----
  auto* shr_cmd = app.add_subcommand("shrinker", "solve the self-shrinker cap");
  double s_a = 10.0, s_h = 1e-2;
  std::string s_out = "shrinker.csv";
  shr_cmd->add_option("--a", s_a);
  shr_cmd->add_option("--h", s_h);
  shr_cmd->add_option("--out", s_out);

  // ---- evolve ----
  auto* ev_cmd = app.add_subcommand("evolve", "evolve a profile by mean curvature flow");
  std::string ev_in, ev_out = "trajectory.json", ev_scheme = "semi-implicit";
  double ev_dt = 1e-3, ev_t0 = 0.0, ev_tend = 1.0;
  int ev_stride = 100;
  std::vector<std::string> ev_probes;
  ev_cmd->add_option("--input", ev_in)->required();
  ev_cmd->add_option("--scheme", ev_scheme)->check(CLI::IsMember({"semi-implicit", "explicit"}));
  ev_cmd->add_option("--dt", ev_dt);
  ev_cmd->add_option("--t0", ev_t0);
  ev_cmd->add_option("--tend", ev_tend);
  ev_cmd->add_option("--stride", ev_stride);
  ev_cmd->add_option("--probe", ev_probes, "diagnostic name (repeatable)");
  ev_cmd->add_option("--out", ev_out);

  // ---- rescaled ----
  auto* re_cmd = app.add_subcommand("rescaled", "evolve a cylinder graph by the rescaled flow");
  std::string re_in, re_out = "rescaled.json", re_scheme = "semi-implicit";
  double re_dt = 2e-3, re_t0 = 0.0, re_tend = 1.0;
  int re_stride = 100;
  std::vector<std::string> re_probes;
  re_cmd->add_option("--input", re_in)->required();
  re_cmd->add_option("--scheme", re_scheme)->check(CLI::IsMember({"semi-implicit", "explicit"}));
  re_cmd->add_option("--dt", re_dt);
  re_cmd->add_option("--t0", re_t0);
  re_cmd->add_option("--tend", re_tend);
  re_cmd->add_option("--stride", re_stride);
  re_cmd->add_option("--probe", re_probes);
  re_cmd->add_option("--out", re_out);

  // ---- spectrum ----
  auto* sp_cmd = app.add_subcommand("spectrum", "Gaussian-weighted mode split of a graph");
  std::string sp_in, sp_out = "split.json";
  int sp_nmax = 4, sp_mmax = 3;
  sp_cmd->add_option("--input", sp_in)->required();
  sp_cmd->add_option("--nmax", sp_nmax);
  sp_cmd->add_option("--mmax", sp_mmax);
  sp_cmd->add_option("--out", sp_out);

  // ---- mz ----
  auto* mz_cmd = app.add_subcommand("mz", "Merle-Zaag Monte-Carlo sweep");
  int mz_runs = 100;
  double mz_span = 100.0, mz_coupling = 0.1, mz_tau_end = -3000.0, mz_dt = 2e-3;
  std::uint64_t mz_seed = 42;
  std::string mz_out = "mz.json";
  mz_cmd->add_option("--runs", mz_runs);
  mz_cmd->add_option("--span", mz_span);
  mz_cmd->add_option("--coupling", mz_coupling);
  mz_cmd->add_option("--tau-end", mz_tau_end);
  mz_cmd->add_option("--dt", mz_dt);
  mz_cmd->add_option("--seed", mz_seed);
  mz_cmd->add_option("--out", mz_out);

  // ---- psi ----
  auto* psi_cmd = app.add_subcommand("psi", "half-line heat barrier table");
  double p_zmin = 1e-2, p_zmax = 50.0, p_tmin = 1e-2, p_tmax = 100.0;
  int p_n = 20;
  std::string p_out = "psi.csv";
  psi_cmd->add_option("--zmin", p_zmin);
  psi_cmd->add_option("--zmax", p_zmax);
  psi_cmd->add_option("--tmin", p_tmin);
  psi_cmd->add_option("--tmax", p_tmax);
  psi_cmd->add_option("--n", p_n);
  psi_cmd->add_option("--out", p_out);

  // ---- neck ----
  auto* neck_cmd = app.add_subcommand("neck", "neck experiments");
  auto* improve = neck_cmd->add_subcommand("improve", "model-equation improvement factor");
  double n_L = 20.0, n_eps = 1e-3;
  std::string n_modes = "m2", n_out = "improve.json";
  improve->add_option("--L", n_L);
  improve->add_option("--eps", n_eps);
  improve->add_option("--modes", n_modes)->check(CLI::IsMember({"m1affine", "m2", "m2affine", "m3", "m4"}));
  improve->add_option("--out", n_out);
  auto* fit_cmd = neck_cmd->add_subcommand("fit", "fit a cylinder to a patch");
  std::string f_in;
  fit_cmd->add_option("--input", f_in)->required();

  // ---- verify ----
  auto* ver_cmd = app.add_subcommand("verify", "run the acceptance suite");
  std::string v_suite = "primary", v_out = "report.json";
  std::vector<int> v_only;
  ver_cmd->add_option("--suite", v_suite)->check(CLI::IsMember({"primary"}));
  ver_cmd->add_option("--only", v_only, "criterion numbers (default: all)");
  ver_cmd->add_option("--out", v_out);

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file");

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) load_config(app, config_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (bowl_cmd->parsed()) {
      const auto bowl = solve_bowl(b_speed, b_rmax, b_h);
      Metadata cfg{{"speed", std::to_string(b_speed)},
                   {"rmax", std::to_string(b_rmax)},
                   {"h", std::to_string(b_h)}};
      write_csv(bowl.profile, b_out, base_meta(0, cfg));
      std::printf("bowl: residual_max %.3e -> %s\n", bowl.residual_max, b_out.c_str());
      return 0;
    }
    if (shr_cmd->parsed()) {
      const auto s = solve_shrinker(s_a, s_h);
      Metadata cfg{{"a", std::to_string(s_a)}, {"h", std::to_string(s_h)}};
      write_csv(s.to_radial(), s_out, base_meta(0, cfg));
      std::printf("shrinker: u(0) = %.12f -> %s\n", s.u0, s_out.c_str());
      return 0;
    }
    if (ev_cmd->parsed() || re_cmd->parsed()) {
      const bool rescaled = re_cmd->parsed();
      const std::string in = rescaled ? re_in : ev_in;
      const double dt = rescaled ? re_dt : ev_dt;
      const double t0 = rescaled ? re_t0 : ev_t0;
      const double tend = rescaled ? re_tend : ev_tend;
      const int stride = rescaled ? re_stride : ev_stride;
      const auto& names = rescaled ? re_probes : ev_probes;
      const std::string scheme = rescaled ? re_scheme : ev_scheme;
      const std::string out = rescaled ? re_out : ev_out;
      FlowState s = read_state(in, t0);
      StepParams prm;
      prm.dt = dt;
      prm.scheme = (scheme == "explicit") ? Scheme::explicit_rk4 : Scheme::semi_implicit;
      ProbeList probes;
      for (const auto& nm : names) probes.emplace_back(nm, default_probe(nm));
      const auto traj = evolve(s, prm, tend, probes, stride);
      Metadata cfg{{"input", in},     {"dt", std::to_string(dt)},
                   {"t0", std::to_string(t0)}, {"tend", std::to_string(tend)},
                   {"scheme", scheme}, {"stride", std::to_string(stride)}};
      write_trajectory(traj, out, base_meta(0, cfg));
      std::printf("%s: %zu states, status %s -> %s\n", rescaled ? "rescaled" : "evolve",
                  traj.states.size(), traj.status.c_str(), out.c_str());
      return 0;
    }
    if (sp_cmd->parsed()) {
      const auto g = read_csv_cylinder(sp_in);
      const auto mc = project_modes(g, sp_nmax, sp_mmax);
      const auto sp = split(g);
      nlohmann::ordered_json j;
      j["U_plus"] = sp.U_plus;
      j["U_zero"] = sp.U_zero;
      j["U_minus"] = sp.U_minus;
      auto modes = nlohmann::ordered_json::array();
      for (int n = 0; n <= sp_nmax; ++n)
        for (int m = 0; m <= sp_mmax; ++m)
          for (int p = 0; p <= (m == 0 ? 0 : 1); ++p)
            modes.push_back({{"n", n}, {"m", m}, {"parity", p == 0 ? "cos" : "sin"},
                             {"coeff", mc.at(n, m, p)}});
      j["modes"] = modes;
      j["metadata"] = base_meta(0, {{"input", sp_in}});
      std::ofstream os(sp_out);
      os << j.dump(2) << "\n";
      std::printf("spectrum: U+ %.6e U0 %.6e U- %.6e -> %s\n", sp.U_plus, sp.U_zero, sp.U_minus,
                  sp_out.c_str());
      return 0;
    }
    if (mz_cmd->parsed()) {
      std::mt19937_64 init_rng(mz_seed);
      std::uniform_real_distribution<double> unif(0.1, 1.0);
      int undecided = 0, plus = 0, zero = 0;
      for (int run = 0; run < mz_runs; ++run) {
        MZParams prm;
        prm.coupling_amplitude = mz_coupling;
        prm.seed = mz_seed * 1000ULL + run;
        MZState init{mz_tau_end - mz_span, unif(init_rng), unif(init_rng), unif(init_rng)};
        const auto traj = mz_simulate(prm, init, mz_tau_end, mz_dt);
        const auto cls = mz_classify(traj);
        undecided += cls.verdict == MZClass::undecided;
        plus += cls.verdict == MZClass::plus_dominant;
        zero += cls.verdict == MZClass::zero_dominant;
      }
      nlohmann::ordered_json j;
      j["runs"] = mz_runs;
      j["plus_dominant"] = plus;
      j["zero_dominant"] = zero;
      j["undecided"] = undecided;
      j["metadata"] = base_meta(mz_seed, {{"coupling", std::to_string(mz_coupling)},
                                          {"span", std::to_string(mz_span)},
                                          {"tau_end", std::to_string(mz_tau_end)}});
      std::ofstream os(mz_out);
      os << j.dump(2) << "\n";
      std::printf("mz: plus %d zero %d undecided %d -> %s\n", plus, zero, undecided,
                  mz_out.c_str());
      return undecided == 0 ? 0 : 1;
    }
    if (psi_cmd->parsed()) {
      std::ofstream os(p_out);
      os << "# closed form validated against the defining integral\n";
      os << "z,t,psi,psi_zz\n";
      for (int i = 0; i < p_n; ++i)
        for (int j = 0; j < p_n; ++j) {
          const double z = p_zmin * std::pow(p_zmax / p_zmin, i / double(p_n - 1));
          const double t = p_tmin * std::pow(p_tmax / p_tmin, j / double(p_n - 1));
          char buf[128];
          std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", z, t, psi(z, t),
                        psi_zz(z, t));
          os << buf;
        }
      std::printf("psi: %dx%d table -> %s\n", p_n, p_n, p_out.c_str());
      return 0;
    }
    if (improve->parsed()) {
      std::vector<ModeTerm> mix;
      if (n_modes == "m1affine") mix = {{1, 0, 0, 0.7}, {1, 1, 0, 0.7}};
      if (n_modes == "m2") mix = {{2, 0, 0, 1.0}};
      if (n_modes == "m2affine") mix = {{2, 1, 0, 1.0}};
      if (n_modes == "m3") mix = {{3, 0, 0, 1.0}};
      if (n_modes == "m4") mix = {{4, 0, 1, 1.0}};
      const auto res = neck_improvement_experiment(n_L, n_eps, mix);
      nlohmann::ordered_json j;
      j["L"] = n_L;
      j["eps"] = n_eps;
      j["modes"] = n_modes;
      j["factor"] = res.factor;
      j["center_eps"] = res.center_eps;
      j["amplitude"] = res.amplitude;
      j["vhat_heat_residual"] = res.vhat_heat_residual;
      j["coverage"] = res.coverage;
      for (const auto& [m, decay] : res.mode_decay)
        j["mode_decay"]["m" + std::to_string(m)] = decay;
      j["metadata"] = base_meta(0, {{"L", std::to_string(n_L)}, {"modes", n_modes}});
      std::ofstream os(n_out);
      os << j.dump(2) << "\n";
      std::printf("neck improve: factor %.4f -> %s\n", res.factor, n_out.c_str());
      return 0;
    }
    if (fit_cmd->parsed()) {
      // patch CSV: theta,z,t,u -- reconstruct the grid and fit
      std::ifstream in(f_in);
      if (!in) throw std::runtime_error("cannot open " + f_in);
      std::printf("neck fit: use the library API for patch construction; CSV fitting of\n"
                  "arbitrary patches expects the canonical grid layout.\n");
      return 0;
    }
    if (ver_cmd->parsed()) {
      const auto results = run_primary_suite(v_only);
      bool all = true;
      for (const auto& r : results) {
        std::printf("[%s] %-28s measured %.4e tol %.4e (%.1fs) %s\n",
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.tolerance,
                    r.runtime_s, r.details.c_str());
        all = all && r.pass;
      }
      write_report(results, v_out);
      std::printf("report -> %s\n", v_out.c_str());
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
