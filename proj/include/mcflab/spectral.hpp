// spectral.hpp -- the Gaussian-weighted Hilbert space on the cylinder, the
// operator L f = f_zz + (1/2) f_thth - (z/2) f_z + f, its Hermite x Fourier
// eigenbasis, projections onto the positive/neutral/negative spans, axis
// alignment, the cutoff, and the linearization residual of the rescaled flow.
#pragma once

#include "mcflab/flow.hpp"
#include "mcflab/profile.hpp"

namespace mcflab {

// Physicists' Hermite polynomials: H0 = 1, H1 = 2x, H_{k+1} = 2x H_k - 2k H_{k-1}.
double hermite(int n, double x);

// closed-form z-factor: int H_n(z/2)^2 e^{-z^2/4} dz = 2^{n+1} n! sqrt(pi)
double hermite_norm2_z(int n);

double eigenvalue(int n, int m);  // 1 - (n + m^2)/2

struct HermiteFourierBasis {
  int n_max = 4, m_max = 3;

  // parity: 0 = cos, 1 = sin (m = 0 has only parity 0)
  static double eval(int n, int m, int parity, double theta, double z);
  CylinderGraph sample(int n, int m, int parity, const Grid1D& zgrid, int ntheta) const;
  // closed-form norm^2 under the Gaussian inner product
  static double mode_norm2(int n, int m);
  // max |<phi_i, phi_j>| over distinct pairs, quadrature on the given grid
  double orthogonality_defect(const Grid1D& zgrid, int ntheta) const;
};

// sqrt2 e^{-1/2} 2pi-periodic trapezoid x Simpson of f g e^{-z^2/4}.
double inner_product(const CylinderGraph& f, const CylinderGraph& g,
                     GaussStatus* status = nullptr);
double norm2(const CylinderGraph& f);

// Discrete L with central differences (periodic theta; one-sided z ends).
CylinderGraph apply_L(const CylinderGraph& u);

double rayleigh_quotient(const CylinderGraph& u);  // <Lu,u>/<u,u>

struct ModeCoefficients {
  int n_max = 0, m_max = 0;
  std::vector<double> c;  // [(n * (m_max+1) + m) * 2 + parity], orthonormalized
  double at(int n, int m, int parity) const {
    return c[(static_cast<size_t>(n) * (m_max + 1) + m) * 2 + parity];
  }
  double sum_squares() const;
};
ModeCoefficients project_modes(const CylinderGraph& u, int n_max, int m_max);

struct SpectralSplit {
  double U_plus = 0, U_zero = 0, U_minus = 0;
};
// Projections onto span{1, z, cos, sin} and span{z^2-2, z cos, z sin};
// U_minus is the Parseval remainder ||u||^2 - U_plus - U_zero (clamped >= 0).
SpectralSplit split(const CylinderGraph& u);

// C^2 cutoff: 1 on |s| <= 1/2, 0 beyond |s| >= 2/3, quintic taper between.
double cutoff_phi(double s);
CylinderGraph cutoff(const CylinderGraph& u, double rho);

struct AlignResult {
  Mat3 rotation;  // applied ambient rotation (two tilts, none about x3)
  CylinderGraph aligned;
  int iterations = 0;
  double coeff_residual = 0.0;  // max normalized z cos / z sin coefficient
};
// Finds the small tilt rotation after which the cutoff graph is orthogonal
// to z cos(theta) and z sin(theta); Newton on the two tilt angles.
// rho < 0 selects the default 0.75 * z_max.
AlignResult align_axis(const CylinderGraph& u, double rho = -1.0);

// Re-graph the rotated surface over the cylinder (Catmull-Rom resampling).
CylinderGraph regraph_rotated(const CylinderGraph& g, const Mat3& R);

struct LinearizationResidual {
  std::vector<double> tau;    // interior sample times
  std::vector<double> E_max;  // max |u_tau - L u - <A x, nu_Sigma>| (middle half in z)
  std::vector<double> ratio;  // E_max / (|u|_inf + |grad u|_inf + |A|)
};
// States must be equally spaced in tau. rotations, when given, provide the
// alignment matrices whose finite differences estimate A(tau); otherwise
// A = 0.
LinearizationResidual linearization_residual(const std::vector<FlowState>& states,
                                             const std::vector<Mat3>* rotations = nullptr);

}  // namespace mcflab
