// geometry.hpp -- curvature, normals, Gaussian-weighted area, cross-section
// concavity, inscribed-ball noncollapsing ratio, and containment tests for
// the discrete surfaces in profile.hpp. Normals point away from the enclosed
// region, so H > 0 on convex surfaces.
#pragma once

#include "mcflab/profile.hpp"

namespace mcflab {

struct CurvatureData {
  std::vector<double> H;   // mean curvature k1 + k2
  std::vector<double> k1;  // profile (meridian) direction
  std::vector<double> k2;  // rotational direction
  std::vector<Vec3> nu;    // outward unit normal on the theta = 0 meridian
};

// Curvature of the revolved radius graph r(z). Evaluated at every node;
// interior radii must be positive. k1 = -r_zz/(1+r_z^2)^{3/2},
// k2 = 1/(r sqrt(1+r_z^2)).
CurvatureData curvature_radial(const RadialProfile& p);

// Curvature of the rotational height graph f(r); the removable singularity
// at the tip is closed with the even-extension limit f_r/r -> f_rr(0).
CurvatureData curvature_graph(const GraphProfile& g);

// Pointwise geometry of a cylinder offset graph: radius rho = sqrt2 + u,
// area element W = sqrt(rho^2 (1+u_z^2) + u_theta^2), mean curvature H
// (outward), support <x,nu>, and the graph cosine <nu_Sigma,nu> = rho/W.
struct CylinderGraphGeometry {
  int ntheta = 0, nz = 0;
  std::vector<double> W, H, x_dot_nu, cosg;
  std::vector<double> nu_x, nu_y, nu_z;  // outward unit normal components
  double& at(std::vector<double>& a, int j, int i) const {
    return a[static_cast<size_t>(j) * nz + i];
  }
};
CylinderGraphGeometry cylinder_graph_geometry(const CylinderGraph& g);

struct GaussStatus {
  bool truncation_warning = false;
  double end_integrand = 0.0;  // worst boundary value of the weighted integrand
};

// Gaussian area integral e^{-|x|^2/4} dA over the revolved profile
// (Simpson in z) or the cylinder graph (periodic trapezoid in theta,
// Simpson in z). Sets a truncation warning when the weighted integrand
// exceeds 1e-16 at the z-ends.
double gaussian_area(const RadialProfile& p, GaussStatus* status = nullptr);
double gaussian_area(const CylinderGraph& g, GaussStatus* status = nullptr);

// sqrt of the cross-section area A(z): pi r^2 for radial profiles,
// (1/2) int (sqrt2+u)^2 dtheta for cylinder graphs. concavity_violation is
// the largest positive raw second difference of sqrt(A) (0 when concave).
struct CrossSection {
  std::vector<double> sqrtA;
  double concavity_violation = 0.0;
};
CrossSection cross_section_sqrt_area(const RadialProfile& p);
CrossSection cross_section_sqrt_area(const CylinderGraph& g);

// min over valid nodes of (inscribed tangent ball radius) * H. Nodes with
// |r_z| > 2 are skipped (graph-direction validity); ends with r above the
// tip threshold are treated as extending with clamped radius.
struct NoncollapsingResult {
  double ratio = 0.0;
  bool convex = true;        // discrete r_zz <= tol nodewise
  int worst_node = -1;
  int evaluated_nodes = 0;
};
NoncollapsingResult noncollapsing_ratio(const RadialProfile& p);

// inner radius <= outer radius at every node of the shared z-range
// (resampled to the finer spacing). Throws on disjoint ranges.
struct ContainmentResult {
  bool contained = false;
  double margin = 0.0;  // min(outer - inner)
};
ContainmentResult surface_containment(const RadialProfile& inner, const RadialProfile& outer);

}  // namespace mcflab
