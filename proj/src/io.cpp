#include "mcflab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcflab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_meta(std::ostream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
}

std::vector<std::vector<double>> read_rows(const std::string& path, std::string* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      *header = line;
      have_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw std::runtime_error("no header row in " + path);
  return rows;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const Metadata& config) {
  std::string text;
  for (const auto& [k, v] : config) text += k + "=" + v + "\n";
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

void write_csv(const RadialProfile& p, const std::string& path, const Metadata& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_meta(os, meta);
  os << "z,r\n";
  for (int i = 0; i < p.grid.n; ++i)
    os << fmt17(p.grid.node(i)) << "," << fmt17(p.r[i]) << "\n";
}

void write_csv(const GraphProfile& g, const std::string& path, const Metadata& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_meta(os, meta);
  os << "r,f\n";
  for (int i = 0; i < g.grid.n; ++i)
    os << fmt17(g.grid.node(i)) << "," << fmt17(g.f[i]) << "\n";
}

void write_csv(const CylinderGraph& g, const std::string& path, const Metadata& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_meta(os, meta);
  os << "theta,z,u\n";
  for (int j = 0; j < g.ntheta; ++j)
    for (int i = 0; i < g.zgrid.n; ++i)
      os << fmt17(g.theta(j)) << "," << fmt17(g.zgrid.node(i)) << "," << fmt17(g.at(j, i))
         << "\n";
}

void write_csv(const NeckPatch& p, const std::string& path, const Metadata& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_meta(os, meta);
  os << "theta,z,t,u\n";
  for (int it = 0; it < p.nt(); ++it)
    for (int j = 0; j < p.ntheta; ++j)
      for (int i = 0; i < p.nz(); ++i)
        os << fmt17(p.theta(j)) << "," << fmt17(p.zgrid.node(i)) << ","
           << fmt17(p.tgrid.node(it)) << "," << fmt17(p.at(it, j, i)) << "\n";
}

RadialProfile read_csv_radial(const std::string& path) {
  std::string header;
  const auto rows = read_rows(path, &header);
  if (header != "z,r") throw std::runtime_error(path + ": expected header z,r");
  const int n = static_cast<int>(rows.size());
  RadialProfile p{Grid1D::linspace(rows.front()[0], rows.back()[0], n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) p.r[i] = rows[i][1];
  return p;
}

GraphProfile read_csv_graph(const std::string& path) {
  std::string header;
  const auto rows = read_rows(path, &header);
  if (header != "r,f") throw std::runtime_error(path + ": expected header r,f");
  const int n = static_cast<int>(rows.size());
  GraphProfile g{Grid1D::linspace(rows.front()[0], rows.back()[0], n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) g.f[i] = rows[i][1];
  return g;
}

CylinderGraph read_csv_cylinder(const std::string& path) {
  std::string header;
  const auto rows = read_rows(path, &header);
  if (header != "theta,z,u") throw std::runtime_error(path + ": expected header theta,z,u");
  // theta-major ordering; infer nz from the first theta block
  int nz = 0;
  const double th0 = rows.front()[0];
  while (nz < static_cast<int>(rows.size()) && rows[nz][0] == th0) ++nz;
  const int ntheta = static_cast<int>(rows.size()) / nz;
  CylinderGraph g = make_cylinder_graph(rows.front()[1], rows[nz - 1][1], nz, ntheta);
  for (int j = 0; j < ntheta; ++j)
    for (int i = 0; i < nz; ++i) g.at(j, i) = rows[static_cast<size_t>(j) * nz + i][2];
  g.validate();
  return g;
}

FlowState read_state(const std::string& path, double t) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') break;
  in.close();
  FlowState s;
  s.t = t;
  if (line == "z,r")
    s.payload = read_csv_radial(path);
  else if (line == "r,f")
    s.payload = read_csv_graph(path);
  else if (line == "theta,z,u")
    s.payload = read_csv_cylinder(path);
  else
    throw std::runtime_error(path + ": unknown header " + line);
  return s;
}

void write_json(const RadialProfile& p, const std::string& path, const Metadata& meta) {
  nlohmann::ordered_json j;
  j["grid"] = {{"lo", p.grid.lo}, {"hi", p.grid.hi}, {"n", p.grid.n}};
  j["values"] = p.r;
  j["metadata"] = meta;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

void write_trajectory(const Trajectory& traj, const std::string& path, const Metadata& meta) {
  nlohmann::ordered_json j;
  j["params"] = meta;
  j["status"] = traj.status;
  auto states = nlohmann::ordered_json::array();
  for (size_t k = 0; k < traj.states.size(); ++k) {
    const std::string sidecar = path + ".state" + std::to_string(k) + ".csv";
    const auto& st = traj.states[k];
    if (auto* r = std::get_if<RadialProfile>(&st.payload))
      write_csv(*r, sidecar, meta);
    else if (auto* g = std::get_if<GraphProfile>(&st.payload))
      write_csv(*g, sidecar, meta);
    else
      write_csv(std::get<CylinderGraph>(st.payload), sidecar, meta);
    states.push_back({{"t", st.t}, {"payload", sidecar}});
  }
  j["states"] = states;
  nlohmann::ordered_json diag;
  diag["t"] = traj.diag_times;
  for (const auto& [name, series] : traj.diagnostics) diag[name] = series;
  j["diagnostics"] = diag;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

std::string emit_report(const std::vector<CheckResult>& results) {
  nlohmann::ordered_json j;
  auto checks = nlohmann::ordered_json::array();
  int passed = 0;
  for (const auto& r : results) {
    checks.push_back({{"name", r.name},
                      {"anchor", r.anchor},
                      {"measured", r.measured},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass},
                      {"runtime_s", r.runtime_s},
                      {"details", r.details}});
    if (r.pass) ++passed;
  }
  j["checks"] = checks;
  j["summary"] = {{"total", results.size()},
                  {"passed", passed},
                  {"all_pass", passed == static_cast<int>(results.size())}};
  return j.dump(2) + "\n";
}

void write_report(const std::vector<CheckResult>& results, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << emit_report(results);
}

}  // namespace mcflab
