// io.hpp -- CSV and JSON serialization for profiles, patches, and
// trajectories, plus the machine-readable check report. CSV files carry
// '#'-prefixed metadata lines (config hash, seed) before the header row;
// values are written with 17 significant digits.
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mcflab/flow.hpp"
#include "mcflab/neck.hpp"
#include "mcflab/profile.hpp"

namespace mcflab {

using Metadata = std::map<std::string, std::string>;

std::uint64_t fnv1a64(const std::string& text);
std::string config_hash(const Metadata& config);  // hex digest of the sorted key=value lines

void write_csv(const RadialProfile& p, const std::string& path, const Metadata& meta = {});
void write_csv(const GraphProfile& g, const std::string& path, const Metadata& meta = {});
void write_csv(const CylinderGraph& g, const std::string& path, const Metadata& meta = {});
void write_csv(const NeckPatch& p, const std::string& path, const Metadata& meta = {});

RadialProfile read_csv_radial(const std::string& path);
GraphProfile read_csv_graph(const std::string& path);
CylinderGraph read_csv_cylinder(const std::string& path);

// Reads the header row to dispatch on {z,r | r,f | theta,z,u}.
FlowState read_state(const std::string& path, double t);

void write_json(const RadialProfile& p, const std::string& path, const Metadata& meta = {});

// Trajectory envelope {params, states: [{t, payload}], diagnostics} with
// payloads in sidecar CSV files next to `path`.
void write_trajectory(const Trajectory& traj, const std::string& path,
                      const Metadata& meta = {});

struct CheckResult {
  std::string name;
  std::string anchor;  // which stated relation the check exercises
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_s = 0.0;
  std::string details;
};

// {checks: [...], summary}, deterministic field order.
std::string emit_report(const std::vector<CheckResult>& results);
void write_report(const std::vector<CheckResult>& results, const std::string& path);

}  // namespace mcflab
