// flow.hpp -- time stepping for the axisymmetric mean curvature flow in graph
// and radius form, and for the rescaled flow of offset graphs over the
// cylinder. All steppers are pure: they take a state and return the next one.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "mcflab/geometry.hpp"
#include "mcflab/profile.hpp"

namespace mcflab {

enum class Scheme { explicit_rk4, semi_implicit };
enum class Boundary { fixed_value, extrapolated, reflect };

struct StepParams {
  double dt = 1e-3;
  Scheme scheme = Scheme::semi_implicit;
  Boundary boundary = Boundary::extrapolated;
  double stability_factor = 1.0;  // scales the explicit CFL bound
};

struct FlowState {
  double t = 0.0;  // rescaled time tau for CylinderGraph payloads
  std::variant<GraphProfile, RadialProfile, CylinderGraph> payload;
};

struct ExtinctionEvent {
  bool occurred = false;
  double time = 0.0;
  int node = -1;
};

// f_t = f_rr/(1+f_r^2) + f_r/r with the tip rule f_t(0) = 2 f_rr(0).
FlowState step_graph(const FlowState& s, const StepParams& p);

// r_t = r_zz/(1+r_z^2) - 1/r; the semi-implicit scheme linearizes -1/r about
// the current state. A zero crossing is reported through *event and the step
// is not applied.
FlowState step_radius(const FlowState& s, const StepParams& p, ExtinctionEvent* event = nullptr);

// Full nonlinear rescaled-flow graph equation over the cylinder:
// u_tau = -(H - <x,nu>/2) W / rho, Dirichlet data frozen at the z-ends.
// Rejects the step when the graph bound sqrt(u_z^2 + (u_theta/rho)^2) > 0.5
// is violated.
FlowState step_rescaled(const FlowState& s, const StepParams& p);

using Probe = std::function<double(const FlowState&)>;
using ProbeList = std::vector<std::pair<std::string, Probe>>;

// Built-in probes by name: "H_max", "gaussian_area", "r_min", "r_mid",
// "tip_height", "u_maxabs".
Probe default_probe(const std::string& name);

struct Trajectory {
  std::vector<FlowState> states;    // strided, always includes first and last
  std::vector<double> diag_times;   // one entry per accepted step + 1
  std::map<std::string, std::vector<double>> diagnostics;
  std::string status = "ok";        // "ok" | "extinct"
  ExtinctionEvent extinction;
};

Trajectory evolve(const FlowState& s0, const StepParams& p, double t_end,
                  const ProbeList& probes, int state_stride = 1);

// Per-node extinction time by quadratic extrapolation of r^2 in t from the
// last three stored states; +inf where the fit never reaches zero.
std::vector<double> extinction_profile(const Trajectory& traj);

const RadialProfile& as_radial(const FlowState& s);
const GraphProfile& as_graph(const FlowState& s);
const CylinderGraph& as_cylinder(const FlowState& s);

}  // namespace mcflab
