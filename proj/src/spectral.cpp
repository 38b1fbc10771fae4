#include "mcflab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace mcflab {

double hermite(int n, double x) {
  if (n == 0) return 1.0;
  double hm = 1.0, hc = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double hn = 2.0 * x * hc - 2.0 * k * hm;
    hm = hc;
    hc = hn;
  }
  return hc;
}

double hermite_norm2_z(int n) {
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return std::pow(2.0, n + 1) * fact * std::sqrt(M_PI);
}

double eigenvalue(int n, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("eigenvalue: n, m >= 0");
  return 1.0 - (n + m * m) / 2.0;
}

double HermiteFourierBasis::eval(int n, int m, int parity, double theta, double z) {
  const double ang = (m == 0) ? 1.0 : (parity == 0 ? std::cos(m * theta) : std::sin(m * theta));
  return hermite(n, z / 2.0) * ang;
}

CylinderGraph HermiteFourierBasis::sample(int n, int m, int parity, const Grid1D& zgrid,
                                          int ntheta) const {
  CylinderGraph g = make_cylinder_graph(zgrid.lo, zgrid.hi, zgrid.n, ntheta);
  for (int j = 0; j < ntheta; ++j)
    for (int i = 0; i < zgrid.n; ++i) g.at(j, i) = eval(n, m, parity, g.theta(j), zgrid.node(i));
  return g;
}

double HermiteFourierBasis::mode_norm2(int n, int m) {
  const double theta_factor = (m == 0) ? 2.0 * M_PI : M_PI;
  return kSqrt2 * std::exp(-0.5) * theta_factor * hermite_norm2_z(n);
}

double HermiteFourierBasis::orthogonality_defect(const Grid1D& zgrid, int ntheta) const {
  struct Mode {
    int n, m, p;
  };
  std::vector<Mode> modes;
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= m_max; ++m)
      for (int p = 0; p <= (m == 0 ? 0 : 1); ++p) modes.push_back({n, m, p});
  std::vector<CylinderGraph> fields;
  fields.reserve(modes.size());
  for (const auto& mo : modes) fields.push_back(sample(mo.n, mo.m, mo.p, zgrid, ntheta));
  double worst = 0.0;
  for (size_t i = 0; i < modes.size(); ++i)
    for (size_t j = i; j < modes.size(); ++j) {
      const double ip = inner_product(fields[i], fields[j]);
      const double ni = std::sqrt(mode_norm2(modes[i].n, modes[i].m));
      const double nj = std::sqrt(mode_norm2(modes[j].n, modes[j].m));
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(ip / (ni * nj) - target));
    }
  return worst;
}

double inner_product(const CylinderGraph& f, const CylinderGraph& g, GaussStatus* status) {
  f.validate();
  g.validate();
  if (f.ntheta != g.ntheta || f.zgrid.n != g.zgrid.n ||
      std::abs(f.zgrid.lo - g.zgrid.lo) > 1e-12 || std::abs(f.zgrid.hi - g.zgrid.hi) > 1e-12)
    throw std::invalid_argument("inner_product: grids differ");
  const int nt = f.ntheta, nz = f.zgrid.n;
  std::vector<double> zline(nz), tline(nt);
  double worst_end = 0.0;
  for (int i = 0; i < nz; ++i) {
    const double w = std::exp(-f.zgrid.node(i) * f.zgrid.node(i) / 4.0);
    for (int j = 0; j < nt; ++j) tline[j] = f.at(j, i) * g.at(j, i) * w;
    zline[i] = periodic_trapezoid(tline, f.htheta());
    if (i == 0 || i == nz - 1) worst_end = std::max(worst_end, max_abs(tline));
  }
  if (status) {
    status->end_integrand = worst_end;
    status->truncation_warning = worst_end > 1e-16;
  }
  return kSqrt2 * std::exp(-0.5) * simpson(zline, f.zgrid.h());
}

double norm2(const CylinderGraph& f) { return inner_product(f, f); }

CylinderGraph apply_L(const CylinderGraph& u) {
  u.validate();
  const int nt = u.ntheta, nz = u.nz();
  const double hz = u.zgrid.h(), ht = u.htheta();
  CylinderGraph out = u;
  for (int j = 0; j < nt; ++j) {
    const int jp = (j + 1) % nt, jm = (j + nt - 1) % nt;
    for (int i = 0; i < nz; ++i) {
      const double z = u.zgrid.node(i);
      double uz, uzz;
      if (i == 0) {
        uz = (-3.0 * u.at(j, 0) + 4.0 * u.at(j, 1) - u.at(j, 2)) / (2.0 * hz);
        uzz = (2.0 * u.at(j, 0) - 5.0 * u.at(j, 1) + 4.0 * u.at(j, 2) - u.at(j, 3)) / (hz * hz);
      } else if (i == nz - 1) {
        uz = (3.0 * u.at(j, i) - 4.0 * u.at(j, i - 1) + u.at(j, i - 2)) / (2.0 * hz);
        uzz = (2.0 * u.at(j, i) - 5.0 * u.at(j, i - 1) + 4.0 * u.at(j, i - 2) - u.at(j, i - 3)) /
              (hz * hz);
      } else {
        uz = (u.at(j, i + 1) - u.at(j, i - 1)) / (2.0 * hz);
        uzz = (u.at(j, i + 1) - 2.0 * u.at(j, i) + u.at(j, i - 1)) / (hz * hz);
      }
      const double utt = (u.at(jp, i) - 2.0 * u.at(j, i) + u.at(jm, i)) / (ht * ht);
      out.at(j, i) = uzz + 0.5 * utt - 0.5 * z * uz + u.at(j, i);
    }
  }
  return out;
}

double rayleigh_quotient(const CylinderGraph& u) {
  return inner_product(apply_L(u), u) / norm2(u);
}

double ModeCoefficients::sum_squares() const {
  double s = 0;
  for (double v : c) s += v * v;
  return s;
}

ModeCoefficients project_modes(const CylinderGraph& u, int n_max, int m_max) {
  ModeCoefficients mc;
  mc.n_max = n_max;
  mc.m_max = m_max;
  mc.c.assign(static_cast<size_t>(n_max + 1) * (m_max + 1) * 2, 0.0);
  HermiteFourierBasis basis{n_max, m_max};
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= m_max; ++m)
      for (int p = 0; p <= (m == 0 ? 0 : 1); ++p) {
        const auto phi = basis.sample(n, m, p, u.zgrid, u.ntheta);
        const double nrm2 = inner_product(phi, phi);  // grid-consistent norm
        const double coeff = inner_product(u, phi) / std::sqrt(nrm2);
        mc.c[(static_cast<size_t>(n) * (m_max + 1) + m) * 2 + p] = coeff;
      }
  return mc;
}

SpectralSplit split(const CylinderGraph& u) {
  const auto mc = project_modes(u, 2, 1);
  SpectralSplit s;
  s.U_plus = mc.at(0, 0, 0) * mc.at(0, 0, 0) + mc.at(1, 0, 0) * mc.at(1, 0, 0) +
             mc.at(0, 1, 0) * mc.at(0, 1, 0) + mc.at(0, 1, 1) * mc.at(0, 1, 1);
  s.U_zero = mc.at(2, 0, 0) * mc.at(2, 0, 0) + mc.at(1, 1, 0) * mc.at(1, 1, 0) +
             mc.at(1, 1, 1) * mc.at(1, 1, 1);
  s.U_minus = std::max(0.0, norm2(u) - s.U_plus - s.U_zero);
  return s;
}

double cutoff_phi(double s) {
  const double a = std::abs(s);
  if (a <= 0.5) return 1.0;
  if (a >= 2.0 / 3.0) return 0.0;
  const double t = (a - 0.5) * 6.0;  // [0,1] over the taper
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

CylinderGraph cutoff(const CylinderGraph& u, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("cutoff: rho > 0 required");
  CylinderGraph out = u;
  for (int i = 0; i < u.nz(); ++i) {
    const double phi = cutoff_phi(u.zgrid.node(i) / rho);
    for (int j = 0; j < u.ntheta; ++j) out.at(j, i) = u.at(j, i) * phi;
  }
  return out;
}

CylinderGraph regraph_rotated(const CylinderGraph& g, const Mat3& R) {
  g.validate();
  const int nt = g.ntheta, nz = g.nz();
  const double hz = g.zgrid.h(), ht = g.htheta();
  const Mat3 Rt = R.transpose();
  // Catmull-Rom in theta (periodic) and z (clamped)
  auto interp_u = [&](double theta, double z) {
    theta = std::fmod(theta, 2.0 * M_PI);
    if (theta < 0) theta += 2.0 * M_PI;
    const double st = theta / ht;
    int j0 = static_cast<int>(std::floor(st));
    const double tt = st - j0;
    double sz = (z - g.zgrid.lo) / hz;
    sz = std::clamp(sz, 0.0, double(nz - 1));
    int i0 = std::min(static_cast<int>(std::floor(sz)), nz - 2);
    const double tz = sz - i0;
    auto val = [&](int j, int i) { return g.at((j % nt + nt) % nt, std::clamp(i, 0, nz - 1)); };
    auto cr = [](double fm1, double f0, double f1, double f2, double t) {
      const double a0 = -0.5 * fm1 + 1.5 * f0 - 1.5 * f1 + 0.5 * f2;
      const double a1 = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
      const double a2 = -0.5 * fm1 + 0.5 * f1;
      return ((a0 * t + a1) * t + a2) * t + f0;
    };
    double zi[4];
    for (int d = -1; d <= 2; ++d)
      zi[d + 1] = cr(val(j0 - 1, i0 + d), val(j0, i0 + d), val(j0 + 1, i0 + d),
                     val(j0 + 2, i0 + d), tt);
    return cr(zi[0], zi[1], zi[2], zi[3], tz);
  };
  CylinderGraph out = g;
  for (int j = 0; j < nt; ++j) {
    const double th = g.theta(j), cth = std::cos(th), sth = std::sin(th);
    for (int i = 0; i < nz; ++i) {
      const double z = g.zgrid.node(i);
      double s = g.at(j, i);  // warm start
      // solve rho(R^T P(s)) - sqrt2 - u(angle, height of R^T P(s)) = 0
      auto G = [&](double sv) {
        const double rad = kSqrt2 + sv;
        const Vec3 P{rad * cth, rad * sth, z};
        const Vec3 Q = Rt.apply(P);
        const double rq = std::hypot(Q[0], Q[1]);
        return rq - kSqrt2 - interp_u(std::atan2(Q[1], Q[0]), Q[2]);
      };
      double g0 = G(s);
      for (int it = 0; it < 40 && std::abs(g0) > 1e-14; ++it) {
        const double ds = 1e-7;
        const double gp = (G(s + ds) - G(s - ds)) / (2.0 * ds);
        if (std::abs(gp) < 1e-8) break;
        s -= g0 / gp;
        g0 = G(s);
      }
      out.at(j, i) = s;
    }
  }
  out.validate();
  return out;
}

namespace {
// normalized coefficients of z cos(theta), z sin(theta) of the cutoff graph
std::array<double, 2> tilt_coefficients(const CylinderGraph& g, double rho) {
  const auto uc = cutoff(g, rho);
  HermiteFourierBasis basis;
  const auto zc = basis.sample(1, 1, 0, g.zgrid, g.ntheta);
  const auto zs = basis.sample(1, 1, 1, g.zgrid, g.ntheta);
  const double nrm = std::sqrt(inner_product(zc, zc));
  return {inner_product(uc, zc) / nrm, inner_product(uc, zs) / nrm};
}
}  // namespace

AlignResult align_axis(const CylinderGraph& u, double rho) {
  u.validate();
  if (rho <= 0.0) rho = 0.75 * std::max(std::abs(u.zgrid.lo), std::abs(u.zgrid.hi));
  AlignResult res;
  double alpha = 0.0, beta = 0.0;
  auto F = [&](double a, double b) {
    const Mat3 R = Mat3::rot_x(a).mul(Mat3::rot_y(b));
    return tilt_coefficients(regraph_rotated(u, R), rho);
  };
  auto cur = tilt_coefficients(u, rho);  // identity shortcut for the first check
  const double scale = std::sqrt(norm2(u)) + 1e-30;
  const double tol = 1e-10 * std::max(1.0, scale);
  bool converged = std::max(std::abs(cur[0]), std::abs(cur[1])) <= tol;
  for (int it = 0; it < 20 && !converged; ++it) {
    const double d = 1e-6;
    const auto fa = F(alpha + d, beta), fb = F(alpha - d, beta);
    const auto ga = F(alpha, beta + d), gb = F(alpha, beta - d);
    const double J00 = (fa[0] - fb[0]) / (2 * d), J01 = (ga[0] - gb[0]) / (2 * d);
    const double J10 = (fa[1] - fb[1]) / (2 * d), J11 = (ga[1] - gb[1]) / (2 * d);
    const double det = J00 * J11 - J01 * J10;
    if (std::abs(det) < 1e-30) throw std::runtime_error("align_axis: singular Jacobian");
    alpha -= (J11 * cur[0] - J01 * cur[1]) / det;
    beta -= (-J10 * cur[0] + J00 * cur[1]) / det;
    cur = F(alpha, beta);
    res.iterations = it + 1;
    converged = std::max(std::abs(cur[0]), std::abs(cur[1])) <= tol;
  }
  if (!converged) throw std::runtime_error("align_axis: Newton did not converge in 20 iterations");
  res.rotation = Mat3::rot_x(alpha).mul(Mat3::rot_y(beta));
  res.aligned = (alpha == 0.0 && beta == 0.0) ? u : regraph_rotated(u, res.rotation);
  res.coeff_residual = std::max(std::abs(cur[0]), std::abs(cur[1]));
  return res;
}

LinearizationResidual linearization_residual(const std::vector<FlowState>& states,
                                             const std::vector<Mat3>* rotations) {
  if (states.size() < 3)
    throw std::invalid_argument("linearization_residual: need >= 3 states");
  if (rotations && rotations->size() != states.size())
    throw std::invalid_argument("linearization_residual: rotations size mismatch");
  const double dt = states[1].t - states[0].t;
  for (size_t k = 1; k < states.size(); ++k)
    if (std::abs(states[k].t - states[k - 1].t - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("linearization_residual: nonuniform time spacing");
  LinearizationResidual out;
  for (size_t k = 1; k + 1 < states.size(); ++k) {
    const auto& um = as_cylinder(states[k - 1]);
    const auto& u0 = as_cylinder(states[k]);
    const auto& up = as_cylinder(states[k + 1]);
    const auto Lu = apply_L(u0);
    double a = 0.0, b = 0.0;
    if (rotations) {
      const Mat3& Rm = (*rotations)[k - 1];
      const Mat3& R0 = (*rotations)[k];
      const Mat3& Rp = (*rotations)[k + 1];
      Mat3 dR;
      for (int i = 0; i < 9; ++i) dR.m[i] = (Rp.m[i] - Rm.m[i]) / (2.0 * dt);
      const Mat3 A = dR.mul(R0.transpose());
      a = A(0, 2);
      b = A(1, 2);
    }
    const int nt = u0.ntheta, nz = u0.nz();
    const int i_lo = nz / 4, i_hi = nz - 1 - nz / 4;  // middle half in z
    double emax = 0.0, umax = 0.0, gmax = 0.0;
    const double hz = u0.zgrid.h(), ht = u0.htheta();
    for (int j = 0; j < nt; ++j) {
      const int jp = (j + 1) % nt, jm = (j + nt - 1) % nt;
      for (int i = i_lo; i <= i_hi; ++i) {
        const double z = u0.zgrid.node(i);
        const double ut = (up.at(j, i) - um.at(j, i)) / (2.0 * dt);
        const double rot = z * (a * std::cos(u0.theta(j)) + b * std::sin(u0.theta(j)));
        emax = std::max(emax, std::abs(ut - Lu.at(j, i) - rot));
        umax = std::max(umax, std::abs(u0.at(j, i)));
        const double uz = (u0.at(j, i + 1) - u0.at(j, i - 1)) / (2.0 * hz);
        const double utheta = (u0.at(jp, i) - u0.at(jm, i)) / (2.0 * ht);
        gmax = std::max(gmax, std::hypot(uz, utheta / u0.rho(j, i)));
      }
    }
    const double amag = std::hypot(a, b);
    out.tau.push_back(states[k].t);
    out.E_max.push_back(emax);
    out.ratio.push_back(emax / std::max(umax + gmax + amag, 1e-300));
  }
  return out;
}

}  // namespace mcflab
