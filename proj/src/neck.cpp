#include "mcflab/neck.hpp"

#include <algorithm>
#include <cmath>

#include "mcflab/geometry.hpp"

namespace mcflab {

Vec3 RotationField::value(const Vec3& x) const {
  const Vec3 y = S.transpose().apply(x - q);
  const Vec3 Jy{y[1], -y[0], 0.0};
  return S.apply(Jy);
}

RotationField RotationField::flipped() const {
  RotationField f = *this;
  // conjugating by diag(1,-1,-1) flips J
  f.S = S.mul(Mat3::rot_x(M_PI));
  return f;
}

RotationField RotationField::about_axis(const Vec3& axis, const Vec3& point) {
  const Vec3 a = normalized(axis);
  Vec3 ref{1.0, 0.0, 0.0};
  if (std::abs(a[0]) > 0.9) ref = {0.0, 1.0, 0.0};
  const Vec3 e1 = normalized(cross(a, ref));
  const Vec3 e2 = cross(a, e1);
  RotationField K;
  for (int i = 0; i < 3; ++i) {
    K.S(i, 0) = e1[i];
    K.S(i, 1) = e2[i];
    K.S(i, 2) = a[i];
  }
  K.q = point;
  return K;
}

RotationField RotationField::from_tilt_offset(double tilt_x, double tilt_y, double qx,
                                              double qy) {
  RotationField K;
  K.S = Mat3::rot_x(tilt_x).mul(Mat3::rot_y(tilt_y));
  K.q = {qx, qy, 0.0};
  return K;
}

double RotationField::killing_defect(const Vec3& x, double h) const {
  Mat3 Jac;
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec3 vp = value(xp), vm = value(xm);
    for (int i = 0; i < 3; ++i) Jac(i, j) = (vp[i] - vm[i]) / (2.0 * h);
  }
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(Jac(i, j) + Jac(j, i)));
  return worst;
}

void NeckPatch::validate() const {
  zgrid.validate();
  tgrid.validate();
  if (ntheta < 8) throw std::invalid_argument("NeckPatch: ntheta >= 8 required");
  if (!(tgrid.hi < 0.0)) throw std::invalid_argument("NeckPatch: times must be negative");
  if (u.size() != static_cast<size_t>(nt()) * ntheta * nz())
    throw std::invalid_argument("NeckPatch: u size mismatch");
  for (int it = 0; it < nt(); ++it) {
    const double bound = 0.1 * std::sqrt(-2.0 * tgrid.node(it));
    for (int j = 0; j < ntheta; ++j)
      for (int i = 0; i < nz(); ++i)
        if (std::abs(at(it, j, i)) > bound)
          throw std::domain_error("NeckPatch: |u| exceeds 0.1 sqrt(-2t)");
  }
}

CylinderGraph NeckPatch::slice(int it) const {
  CylinderGraph g = make_cylinder_graph(zgrid.lo, zgrid.hi, nz(), ntheta);
  const double R = std::sqrt(-2.0 * tgrid.node(it));
  for (int j = 0; j < ntheta; ++j)
    for (int i = 0; i < nz(); ++i) g.at(j, i) = R + at(it, j, i) - kSqrt2;
  return g;
}

NeckPatch make_cylinder_patch(double L, int ntheta, int nz, int nt,
                              const std::function<double(double, double, double)>& pert) {
  NeckPatch p;
  p.L = L;
  p.ntheta = ntheta;
  p.zgrid = Grid1D::linspace(-L / 4.0, L / 4.0, nz);
  p.tgrid = Grid1D::linspace(-L * L / 16.0, -1.0, nt);
  p.u.assign(static_cast<size_t>(nt) * ntheta * nz, 0.0);
  if (pert)
    for (int it = 0; it < nt; ++it)
      for (int j = 0; j < ntheta; ++j)
        for (int i = 0; i < nz; ++i)
          p.at(it, j, i) = pert(p.theta(j), p.zgrid.node(i), p.tgrid.node(it));
  p.validate();
  return p;
}

NeckPatch make_bowl_patch(const BowlProfile& bowl, double r0, double L, int ntheta, int nz,
                          int nt) {
  const auto& g = bowl.profile;
  const auto curv = curvature_graph(g);
  const double h = g.grid.h();
  const int i0 = static_cast<int>(std::round(r0 / h));
  if (i0 <= 0 || i0 >= g.grid.n) throw std::invalid_argument("make_bowl_patch: r0 outside profile");
  const double Hbar = curv.H[i0];
  const double lambda = kSqrt2 * Hbar;  // rescale so H(center) = 1/sqrt2
  const double zbar = g.f[i0];
  auto inv = MonotoneCubic::fit(g.f, g.grid.nodes());
  const double c = bowl.speed;
  const double need_hi = zbar + (L / 4.0) / lambda;
  const double need_lo = zbar - (L / 4.0) / lambda - c * (L * L / 16.0 - 1.0) / (lambda * lambda);
  if (need_hi > g.f.back() || need_lo < g.f.front())
    throw std::invalid_argument("make_bowl_patch: bowl profile does not cover the patch");
  NeckPatch p;
  p.L = L;
  p.ntheta = ntheta;
  p.zgrid = Grid1D::linspace(-L / 4.0, L / 4.0, nz);
  p.tgrid = Grid1D::linspace(-L * L / 16.0, -1.0, nt);
  p.u.assign(static_cast<size_t>(nt) * ntheta * nz, 0.0);
  for (int it = 0; it < nt; ++it) {
    const double tp = p.tgrid.node(it);
    const double R = std::sqrt(-2.0 * tp);
    for (int i = 0; i < nz; ++i) {
      const double height = zbar + p.zgrid.node(i) / lambda - c * (tp + 1.0) / (lambda * lambda);
      const double rad = lambda * inv(height);
      for (int j = 0; j < ntheta; ++j) p.at(it, j, i) = rad - R;
    }
  }
  p.validate();
  return p;
}

namespace {

// flattened surface samples with their geometry; built once per patch
struct PatchSamples {
  std::vector<Vec3> X, nu;
  std::vector<double> H, t, z;
  std::vector<int> itheta;
  Vec3 center{0, 0, 0};
  double H_center = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
};

PatchSamples build_samples(const NeckPatch& p) {
  PatchSamples s;
  const int nt = p.nt(), ntheta = p.ntheta, nz = p.nz();
  s.X.reserve(static_cast<size_t>(nt) * ntheta * nz);
  const int ic = nz / 2;
  s.t_lo = p.tgrid.lo;
  s.t_hi = p.tgrid.hi;
  for (int it = 0; it < nt; ++it) {
    const auto geo = cylinder_graph_geometry(p.slice(it));
    for (int j = 0; j < ntheta; ++j) {
      const double th = p.theta(j), cth = std::cos(th), sth = std::sin(th);
      for (int i = 0; i < nz; ++i) {
        const size_t k = static_cast<size_t>(j) * nz + i;
        const double rad = p.radius(it, j, i);
        s.X.push_back({rad * cth, rad * sth, p.zgrid.node(i)});
        s.nu.push_back({geo.nu_x[k], geo.nu_y[k], geo.nu_z[k]});
        s.H.push_back(geo.H[k]);
        s.t.push_back(p.tgrid.node(it));
        s.z.push_back(p.zgrid.node(i));
        s.itheta.push_back(j);
        if (it == nt - 1 && j == 0 && i == ic) {
          s.center = s.X.back();
          s.H_center = s.H.back();
        }
      }
    }
  }
  return s;
}

// indices inside the parabolic window P(center, Lfac, Tfac) truncated to the
// patch; returns the covered fraction of the requested window
std::vector<size_t> window_indices(const PatchSamples& s, const Vec3& x0, double t0, double H0,
                                   double Lfac, double Tfac, double* coverage) {
  const double rad = Lfac / H0;
  const double tmin = t0 - Tfac / (H0 * H0);
  std::vector<size_t> out;
  for (size_t k = 0; k < s.X.size(); ++k) {
    if (s.t[k] < tmin - 1e-12 || s.t[k] > t0 + 1e-12) continue;
    if (norm(s.X[k] - x0) > rad) continue;
    out.push_back(k);
  }
  if (coverage) {
    double zmin = 1e300, zmax = -1e300, t_lo_cov = 1e300;
    for (size_t k : out) {
      zmin = std::min(zmin, s.z[k]);
      zmax = std::max(zmax, s.z[k]);
      t_lo_cov = std::min(t_lo_cov, s.t[k]);
    }
    const double zcov = out.empty() ? 0.0 : (zmax - zmin) / (2.0 * rad);
    const double tcov = out.empty() ? 0.0 : (t0 - t_lo_cov) / (Tfac / (H0 * H0));
    *coverage = std::min(1.0, zcov) * std::min(1.0, tcov);
  }
  return out;
}

double defect_over(const PatchSamples& s, const std::vector<size_t>& idx,
                   const RotationField& K) {
  double worst = 0.0;
  for (size_t k : idx)
    worst = std::max(worst, std::abs(dot(K.value(s.X[k]), s.nu[k])) * s.H[k]);
  return worst;
}

}  // namespace

NeckFit fit_neck(const NeckPatch& patch) {
  patch.validate();
  NeckFit fit;
  const int nt = patch.nt(), ntheta = patch.ntheta, nz = patch.nz();
  // least-squares cylinder through the t = -1 slice
  std::vector<Vec3> pts;
  for (int j = 0; j < ntheta; ++j) {
    const double th = patch.theta(j), cth = std::cos(th), sth = std::sin(th);
    for (int i = 0; i < nz; ++i) {
      const double rad = patch.radius(nt - 1, j, i);
      pts.push_back({rad * cth, rad * sth, patch.zgrid.node(i)});
    }
  }
  double R0 = 0.0;
  for (const auto& P : pts) R0 += std::hypot(P[0], P[1]);
  R0 /= pts.size();
  std::array<double, 5> prm{0, 0, 0, 0, R0};  // ax, ay, cx, cy, R
  auto residuals = [&](const std::array<double, 5>& q, std::vector<double>& r) {
    const Vec3 w = normalized({q[0], q[1], 1.0});
    const Vec3 c{q[2], q[3], 0.0};
    r.resize(pts.size());
    for (size_t k = 0; k < pts.size(); ++k) {
      const Vec3 d = pts[k] - c;
      const Vec3 perp = d - dot(d, w) * w;
      r[k] = norm(perp) - q[4];
    }
  };
  std::vector<double> r0, rp, A;
  for (int it = 0; it < 20; ++it) {
    residuals(prm, r0);
    const int m = static_cast<int>(r0.size());
    A.assign(static_cast<size_t>(m) * 5, 0.0);
    for (int pcol = 0; pcol < 5; ++pcol) {
      auto qp = prm;
      const double d = 1e-7;
      qp[pcol] += d;
      residuals(qp, rp);
      for (int k = 0; k < m; ++k) A[static_cast<size_t>(k) * 5 + pcol] = (rp[k] - r0[k]) / d;
    }
    std::vector<double> negr(m);
    for (int k = 0; k < m; ++k) negr[k] = -r0[k];
    const auto step = least_squares(A, negr, m, 5);
    double biggest = 0.0;
    for (int pcol = 0; pcol < 5; ++pcol) {
      prm[pcol] += step[pcol];
      biggest = std::max(biggest, std::abs(step[pcol]));
    }
    if (biggest < 1e-12) break;
  }
  fit.axis = normalized({prm[0], prm[1], 1.0});
  fit.center = {prm[2], prm[3], 0.0};
  fit.radius = prm[4];

  // parabolic-normalized discrete C^2 distance to the exact shrinking cylinder
  const double hz = patch.zgrid.h(), ht = 2.0 * M_PI / ntheta;
  double eps = 0.0;
  for (int it = 0; it < nt; ++it) {
    const double R = std::sqrt(-2.0 * patch.tgrid.node(it));
    for (int j = 0; j < ntheta; ++j) {
      const int jp = (j + 1) % ntheta, jm = (j + ntheta - 1) % ntheta;
      for (int i = 1; i + 1 < nz; ++i) {
        const double u0 = patch.at(it, j, i);
        const double uz = (patch.at(it, j, i + 1) - patch.at(it, j, i - 1)) / (2 * hz);
        const double uzz =
            (patch.at(it, j, i + 1) - 2 * u0 + patch.at(it, j, i - 1)) / (hz * hz);
        const double uth = (patch.at(it, jp, i) - patch.at(it, jm, i)) / (2 * ht);
        const double uthth = (patch.at(it, jp, i) - 2 * u0 + patch.at(it, jm, i)) / (ht * ht);
        const double uthz = (patch.at(it, jp, i + 1) - patch.at(it, jp, i - 1) -
                             patch.at(it, jm, i + 1) + patch.at(it, jm, i - 1)) /
                            (4 * ht * hz);
        double v = std::abs(u0) / R;
        v = std::max(v, std::abs(uz));
        v = std::max(v, std::abs(uth) / R);
        v = std::max(v, R * std::abs(uzz));
        v = std::max(v, std::abs(uthz));
        v = std::max(v, std::abs(uthth) / R);
        eps = std::max(eps, v);
      }
    }
  }
  fit.eps_measured = eps;
  fit.is_neck = eps <= 0.1;
  return fit;
}

double symmetry_defect(const NeckPatch& patch, const RotationField& K, double* coverage) {
  patch.validate();
  const auto s = build_samples(patch);
  if (norm(K.value(s.center)) * s.H_center > 10.0)
    throw std::invalid_argument("symmetry_defect: |K| H > 10 at the center");
  const auto idx = window_indices(s, s.center, s.t_hi, s.H_center, 10.0, 100.0, coverage);
  return defect_over(s, idx, K);
}

namespace {

RotationField fix_sign(const NeckPatch& patch, const RotationField& K) {
  // theta-averaged <K, e_theta> at the center circle of the last slice
  const int nt = patch.nt(), nz = patch.nz();
  double avg = 0.0;
  for (int j = 0; j < patch.ntheta; ++j) {
    const double th = patch.theta(j), cth = std::cos(th), sth = std::sin(th);
    const double rad = patch.radius(nt - 1, j, nz / 2);
    const Vec3 X{rad * cth, rad * sth, patch.zgrid.node(nz / 2)};
    avg += dot(K.value(X), Vec3{-sth, cth, 0.0});
  }
  return (avg >= 0.0) ? K : K.flipped();
}

}  // namespace

BestRotation best_rotation(const NeckPatch& patch) {
  patch.validate();
  const auto s = build_samples(patch);
  double coverage = 0.0;
  const auto win = window_indices(s, s.center, s.t_hi, s.H_center, 10.0, 100.0, &coverage);
  // subsample for the Gauss-Newton residual vector
  std::vector<size_t> sub;
  const size_t stride = std::max<size_t>(1, win.size() / 6000);
  for (size_t k = 0; k < win.size(); k += stride) sub.push_back(win[k]);

  const auto fit = fit_neck(patch);
  std::array<double, 4> prm{-fit.axis[1] / fit.axis[2], fit.axis[0] / fit.axis[2],
                            fit.center[0], fit.center[1]};
  auto make_K = [](const std::array<double, 4>& q) {
    return RotationField::from_tilt_offset(q[0], q[1], q[2], q[3]);
  };
  auto residuals = [&](const std::array<double, 4>& q, std::vector<double>& r) {
    const RotationField K = make_K(q);
    r.resize(sub.size());
    for (size_t k = 0; k < sub.size(); ++k)
      r[k] = dot(K.value(s.X[sub[k]]), s.nu[sub[k]]) * s.H[sub[k]];
  };
  auto sumsq = [](const std::vector<double>& r) {
    double v = 0;
    for (double x : r) v += x * x;
    return v;
  };
  std::vector<double> r0, rp, A;
  bool converged = false;
  residuals(prm, r0);
  double obj = sumsq(r0);
  for (int it = 0; it < 50 && !converged; ++it) {
    const int m = static_cast<int>(r0.size());
    A.assign(static_cast<size_t>(m) * 4, 0.0);
    for (int pcol = 0; pcol < 4; ++pcol) {
      auto qp = prm;
      const double d = 1e-7;
      qp[pcol] += d;
      residuals(qp, rp);
      for (int k = 0; k < m; ++k) A[static_cast<size_t>(k) * 4 + pcol] = (rp[k] - r0[k]) / d;
    }
    std::vector<double> negr(m);
    for (int k = 0; k < m; ++k) negr[k] = -r0[k];
    std::vector<double> step;
    try {
      step = least_squares(A, negr, m, 4);
    } catch (const std::exception&) {
      break;  // flat objective (already symmetric)
    }
    double lambda = 1.0, new_obj = obj;
    std::array<double, 4> trial = prm;
    for (int half = 0; half < 10; ++half) {
      for (int pcol = 0; pcol < 4; ++pcol) trial[pcol] = prm[pcol] + lambda * step[pcol];
      residuals(trial, rp);
      new_obj = sumsq(rp);
      if (new_obj <= obj) break;
      lambda *= 0.5;
    }
    if (new_obj > obj) break;
    double biggest = 0.0;
    for (int pcol = 0; pcol < 4; ++pcol) {
      biggest = std::max(biggest, std::abs(trial[pcol] - prm[pcol]));
    }
    prm = trial;
    r0 = rp;
    obj = new_obj;
    converged = biggest < 1e-11;
  }
  BestRotation out;
  out.K = fix_sign(patch, make_K(prm));
  out.converged = converged || obj < 1e-24;
  out.eps = defect_over(s, win, out.K);
  return out;
}

double compare_rotation_fields(const RotationField& K1, const RotationField& K2,
                               const NeckPatch& patch, double* coverage) {
  patch.validate();
  const auto s = build_samples(patch);
  const double H0 = s.H_center;
  if (norm(K1.value(s.center)) * H0 > 10.0 || norm(K2.value(s.center)) * H0 > 10.0)
    throw std::invalid_argument("compare_rotation_fields: |K| H > 10 at the center");
  const double rad = 100.0 / H0;
  double sup_diff = 0.0, sup_sum = 0.0;
  double zmin = 1e300, zmax = -1e300;
  const size_t base = static_cast<size_t>(patch.nt() - 1) * patch.ntheta * patch.nz();
  for (size_t k = base; k < s.X.size(); ++k) {  // the t = -1 slice
    if (norm(s.X[k] - s.center) > rad) continue;
    const Vec3 v1 = K1.value(s.X[k]), v2 = K2.value(s.X[k]);
    sup_diff = std::max(sup_diff, norm(v1 - v2));
    sup_sum = std::max(sup_sum, norm(v1 + v2));
    zmin = std::min(zmin, s.z[k]);
    zmax = std::max(zmax, s.z[k]);
  }
  if (coverage) *coverage = std::min(1.0, (zmax - zmin) / (2.0 * rad));
  return std::min(sup_diff, sup_sum) * H0;
}

// ---------------------------------------------------------------------------
// neck improvement experiment
// ---------------------------------------------------------------------------

namespace {

// Crank-Nicolson ladder for the heat equation on [-L/4, L/4] hitting the
// requested store times exactly; calls visit(k_step) after every step and
// store(slot) at the store times.
struct HeatLadder {
  double hz;
  int nzf;
  std::vector<double> v;  // current
  double time;

  void advance_to(double t_next, double dt_target,
                  const std::function<double(double, double)>& boundary,
                  std::vector<double>* residual_probe, double sigma_scale) {
    const int nsub = std::max(1, static_cast<int>(std::ceil((t_next - time) / dt_target)));
    const double dt = (t_next - time) / nsub;
    const double mu = dt / (2.0 * hz * hz);
    std::vector<double> a(nzf), b(nzf), c(nzf), d(nzf);
    std::vector<double> prev;
    for (int k = 0; k < nsub; ++k) {
      const double t_new = time + dt;
      prev = v;
      for (int i = 0; i < nzf; ++i) {
        if (i == 0 || i == nzf - 1) {
          a[i] = c[i] = 0.0;
          b[i] = 1.0;
          d[i] = boundary(i == 0 ? 0.0 : 1.0, t_new);
          continue;
        }
        a[i] = c[i] = -mu;
        b[i] = 1.0 + 2.0 * mu;
        d[i] = v[i] + mu * (v[i + 1] - 2.0 * v[i] + v[i - 1]);
      }
      solve_tridiagonal(a, b, c, d);
      // central residual probe against the previous and new layers
      if (residual_probe && k == nsub / 2 && nsub >= 2) {
        for (int i = 1; i + 1 < nzf; ++i) {
          const double vt = (d[i] - prev[i]) / dt;
          const double mzz = 0.5 *
                             ((d[i + 1] - 2 * d[i] + d[i - 1]) +
                              (prev[i + 1] - 2 * prev[i] + prev[i - 1])) /
                             (hz * hz);
          residual_probe->push_back(std::abs(vt - mzz) * sigma_scale);
        }
      }
      v = d;
      time = t_new;
    }
  }
};

struct SolvedMode {
  int m, parity;
  double sigma_exp;                        // vhat = (-t)^sigma_exp v
  std::vector<std::vector<double>> vhat;   // [store][zfine]
};

}  // namespace

ImprovementResult neck_improvement_experiment(double L, double eps,
                                              const std::vector<ModeTerm>& mix, int ntheta,
                                              int nz, int nt_store) {
  if (!(L >= 10.0)) throw std::invalid_argument("neck_improvement_experiment: L >= 10");
  if (!(eps > 0.0) || eps > 0.01)
    throw std::invalid_argument("neck_improvement_experiment: 0 < eps <= 0.01");
  ImprovementResult out;
  double wsum = 0.0;
  for (const auto& term : mix) wsum += std::abs(term.weight);
  if (wsum == 0.0) return out;  // factor 0/0 guarded

  const double t0 = -L * L / 16.0;
  const Grid1D zgrid = Grid1D::linspace(-L / 4.0, L / 4.0, nz);
  const Grid1D tgrid = Grid1D::linspace(t0, -1.0, nt_store);
  const int kf = 4;  // z refinement of the mode solver over the patch grid
  const int nzf = kf * (nz - 1) + 1;
  const double hzf = (L / 2.0) / (nzf - 1);
  const double zhalf = L / 4.0;

  // data shape in v variables at (zeta = z/(L/4), t)
  auto data_v = [&](const ModeTerm& mt, double zeta, double t) {
    const double prof = (mt.zdeg == 0) ? 1.0 : zeta;
    if (mt.m >= 2) return mt.weight * std::sqrt(-2.0 * t) * prof;
    return mt.weight * prof;  // m = 1 static affine, m = 0 constant
  };

  std::vector<SolvedMode> solved;
  double vhat_res = 0.0;
  for (const auto& mt : mix) {
    if (mt.weight == 0.0) continue;
    SolvedMode sm;
    sm.m = mt.m;
    sm.parity = mt.parity;
    sm.sigma_exp = (1.0 - mt.m * mt.m) / 2.0;
    sm.vhat.assign(nt_store, std::vector<double>(nzf, 0.0));
    HeatLadder lad;
    lad.hz = hzf;
    lad.nzf = nzf;
    lad.time = t0;
    lad.v.assign(nzf, 0.0);
    auto sigma = [&](double t) { return std::pow(-t, sm.sigma_exp); };
    for (int i = 0; i < nzf; ++i) {
      const double z = -zhalf + i * hzf;
      lad.v[i] = sigma(t0) * data_v(mt, z / zhalf, t0);
    }
    sm.vhat[0] = lad.v;
    auto boundary = [&](double side, double t) {
      const double zeta = (side == 0.0) ? -1.0 : 1.0;
      return sigma(t) * data_v(mt, zeta, t);
    };
    std::vector<double> probe;
    for (int itau = 1; itau < nt_store; ++itau) {
      lad.advance_to(tgrid.node(itau), 0.5 * hzf, boundary, &probe, 1.0);
      sm.vhat[itau] = lad.v;
    }
    for (double r : probe) vhat_res = std::max(vhat_res, r);
    solved.push_back(std::move(sm));
  }
  out.vhat_heat_residual = vhat_res;

  // assemble the physical patch from the solved modes
  auto assemble = [&](double amplitude) {
    NeckPatch p;
    p.L = L;
    p.ntheta = ntheta;
    p.zgrid = zgrid;
    p.tgrid = tgrid;
    p.u.assign(static_cast<size_t>(nt_store) * ntheta * nz, 0.0);
    for (const auto& sm : solved) {
      for (int it = 0; it < nt_store; ++it) {
        const double fac = amplitude * std::pow(-tgrid.node(it), -sm.sigma_exp);
        for (int i = 0; i < nz; ++i) {
          const double vm = fac * sm.vhat[it][static_cast<size_t>(i) * kf];
          for (int j = 0; j < ntheta; ++j) {
            const double th = p.theta(j);
            const double ang =
                (sm.m == 0) ? 1.0
                            : (sm.parity == 0 ? std::cos(sm.m * th) : std::sin(sm.m * th));
            p.at(it, j, i) += vm * ang;
          }
        }
      }
    }
    return p;
  };

  // boundary defect of the unit-amplitude data, per window, with and without
  // the best m = 1 affine adjustment
  const NeckPatch unit = assemble(1.0);
  const auto s = build_samples(unit);
  double d_adj = 0.0, d_raw = 0.0;
  auto window_defect = [&](const Vec3& x0, double t0w, double H0) {
    const auto idx = window_indices(s, x0, t0w, H0, 10.0, 100.0, nullptr);
    if (idx.size() < 32) return;
    // field <J x, nu> and the affine adjustment (a0 + a1 z)cos + (b0 + b1 z)sin
    std::vector<double> gfield(idx.size()), A(idx.size() * 4);
    double raw = 0.0;
    for (size_t k = 0; k < idx.size(); ++k) {
      const size_t q = idx[k];
      const Vec3& X = s.X[q];
      const Vec3& nu = s.nu[q];
      gfield[k] = X[1] * nu[0] - X[0] * nu[1];  // <J x, nu>
      const double th = unit.theta(s.itheta[q]);
      A[k * 4 + 0] = std::cos(th);
      A[k * 4 + 1] = s.z[q] * std::cos(th);
      A[k * 4 + 2] = std::sin(th);
      A[k * 4 + 3] = s.z[q] * std::sin(th);
      raw = std::max(raw, std::abs(gfield[k]) * s.H[q]);
    }
    const auto coef = least_squares(A, gfield, static_cast<int>(idx.size()), 4);
    double adj = 0.0;
    for (size_t k = 0; k < idx.size(); ++k) {
      const size_t q = idx[k];
      const double fitv = A[k * 4 + 0] * coef[0] + A[k * 4 + 1] * coef[1] +
                          A[k * 4 + 2] * coef[2] + A[k * 4 + 3] * coef[3];
      adj = std::max(adj, std::abs(gfield[k] - fitv) * s.H[q]);
    }
    d_raw = std::max(d_raw, raw);
    d_adj = std::max(d_adj, adj);
  };
  // window centers along the parabolic boundary
  for (int side = 0; side < 2; ++side) {
    const int i_edge = (side == 0) ? 0 : nz - 1;
    for (int it = 0; it < nt_store; it += std::max(1, nt_store / 8)) {
      const double t0w = tgrid.node(it);
      const double R = std::sqrt(-2.0 * t0w);
      const Vec3 x0{unit.radius(it, 0, i_edge), 0.0, zgrid.node(i_edge)};
      window_defect(x0, t0w, 1.0 / R);
    }
  }
  for (int i = 0; i < nz; i += std::max(1, nz / 8)) {
    const double R = std::sqrt(-2.0 * t0);
    const Vec3 x0{unit.radius(0, 0, i), 0.0, zgrid.node(i)};
    window_defect(x0, t0, 1.0 / R);
  }
  const double denom = (d_adj > 0.05 * d_raw) ? d_adj : d_raw;
  if (denom == 0.0) return out;
  const double amp = eps / denom;
  out.amplitude = amp;
  out.input_eps = eps;

  // center measurement on the interior half-width region
  const NeckPatch full = assemble(amp);
  const double z_meas = L / 8.0;
  const double t_meas = std::max(-std::max(4.0, L * L / 64.0), t0 + 1e-9);
  const int i_lo = static_cast<int>(std::ceil((-z_meas - zgrid.lo) / zgrid.h()));
  const int i_hi = static_cast<int>(std::floor((z_meas - zgrid.lo) / zgrid.h()));
  const int it_lo = static_cast<int>(std::ceil((t_meas - tgrid.lo) / tgrid.h()));
  NeckPatch center;
  center.L = L;
  center.ntheta = ntheta;
  center.zgrid = Grid1D::linspace(zgrid.node(i_lo), zgrid.node(i_hi), i_hi - i_lo + 1);
  center.tgrid = Grid1D::linspace(tgrid.node(it_lo), -1.0, nt_store - it_lo);
  center.u.assign(static_cast<size_t>(center.nt()) * ntheta * center.nz(), 0.0);
  for (int it = it_lo; it < nt_store; ++it)
    for (int j = 0; j < ntheta; ++j)
      for (int i = i_lo; i <= i_hi; ++i)
        center.at(it - it_lo, j, i - i_lo) = full.at(it, j, i);
  const auto best = best_rotation(center);
  out.center_eps = best.eps;
  out.factor = best.eps / eps;
  double cov;
  symmetry_defect(center, best.K, &cov);
  out.coverage = cov;

  // per-mode center amplitude decay and the m = 0 track
  for (const auto& sm : solved) {
    auto amp_at = [&](int it) {
      const double fac = amp * std::pow(-tgrid.node(it), -sm.sigma_exp);
      double worst = 0.0;
      for (int i = i_lo; i <= i_hi; ++i)
        worst = std::max(worst, std::abs(fac * sm.vhat[it][static_cast<size_t>(i) * kf]));
      return worst;
    };
    const double a0 = amp_at(0), a1 = amp_at(nt_store - 1);
    if (sm.m == 0) {
      double worst = 0.0;
      for (int it = it_lo; it < nt_store; ++it) worst = std::max(worst, amp_at(it));
      out.m0_center_max = std::max(out.m0_center_max, worst);
    } else if (a0 > 0.0) {
      const double ratio = a1 / a0;
      auto [pos, inserted] = out.mode_decay.try_emplace(sm.m, ratio);
      if (!inserted) pos->second = std::max(pos->second, ratio);
    }
  }
  return out;
}

double K_nu_evolution_residual(const Trajectory& traj, const RotationField& K) {
  const auto& states = traj.states;
  if (states.size() < 3)
    throw std::invalid_argument("K_nu_evolution_residual: need >= 3 states");
  const double dt = states[1].t - states[0].t;
  for (size_t k = 1; k < states.size(); ++k)
    if (std::abs(states[k].t - states[k - 1].t - dt) > 1e-9 * std::abs(dt))
      throw std::invalid_argument("K_nu_evolution_residual: nonuniform spacing");
  const int ntheta = 8;
  double worst = 0.0;
  for (size_t k = 1; k + 1 < states.size(); ++k) {
    const auto& pm = as_radial(states[k - 1]);
    const auto& p0 = as_radial(states[k]);
    const auto& pp = as_radial(states[k + 1]);
    const int n = p0.grid.n;
    const double h = p0.grid.h();
    const auto rz = deriv1(p0.r, h);
    const auto curv = curvature_radial(p0);
    // <K, nu> sampled on the revolved surface
    auto g_at = [&](const RadialProfile& p, const std::vector<double>& rzv, int i, int j) {
      const double th = 2.0 * M_PI * j / ntheta;
      const double q = std::sqrt(1.0 + rzv[i] * rzv[i]);
      const Vec3 X{p.r[i] * std::cos(th), p.r[i] * std::sin(th), p.grid.node(i)};
      const Vec3 nu{std::cos(th) / q, std::sin(th) / q, -rzv[i] / q};
      return dot(K.value(X), nu);
    };
    const auto rzm = deriv1(pm.r, h);
    const auto rzp = deriv1(pp.r, h);
    // mode decomposition g = c0(z) + c1 cos + s1 sin (exact for rotations)
    std::vector<double> c0(n), c1(n), s1(n);
    for (int i = 0; i < n; ++i) {
      double a0 = 0, ac = 0, as = 0;
      for (int j = 0; j < ntheta; ++j) {
        const double g = g_at(p0, rz, i, j);
        const double th = 2.0 * M_PI * j / ntheta;
        a0 += g;
        ac += g * std::cos(th);
        as += g * std::sin(th);
      }
      c0[i] = a0 / ntheta;
      c1[i] = 2.0 * ac / ntheta;
      s1[i] = 2.0 * as / ntheta;
    }
    // surface Laplacian per mode: (1/(r sqrtQ)) d/dz( r g'/sqrtQ ) - m^2 g/r^2
    auto lap_mode = [&](const std::vector<double>& gm, int m, std::vector<double>& out_lap) {
      const auto gz = deriv1(gm, h);
      std::vector<double> flux(n);
      for (int i = 0; i < n; ++i)
        flux[i] = p0.r[i] * gz[i] / std::sqrt(1.0 + rz[i] * rz[i]);
      const auto dflux = deriv1(flux, h);
      out_lap.resize(n);
      for (int i = 0; i < n; ++i) {
        const double q = std::sqrt(1.0 + rz[i] * rz[i]);
        out_lap[i] = dflux[i] / (p0.r[i] * q) - m * m * gm[i] / (p0.r[i] * p0.r[i]);
      }
    };
    std::vector<double> l0, l1, ls1;
    lap_mode(c0, 0, l0);
    lap_mode(c1, 1, l1);
    lap_mode(s1, 1, ls1);
    const int margin = std::max(2, n / 10);
    for (int i = margin; i < n - margin; ++i) {
      const double A2 = curv.k1[i] * curv.k1[i] + curv.k2[i] * curv.k2[i];
      const double rt = (pp.r[i] - pm.r[i]) / (2.0 * dt);
      const double q2 = 1.0 + rz[i] * rz[i];
      for (int j = 0; j < ntheta; ++j) {
        const double th = 2.0 * M_PI * j / ntheta;
        const double lhs = (g_at(pp, rzp, i, j) - g_at(pm, rzm, i, j)) / (2.0 * dt);
        const double lap = l0[i] + l1[i] * std::cos(th) + ls1[i] * std::sin(th);
        const double gval = c0[i] + c1[i] * std::cos(th) + s1[i] * std::sin(th);
        // advection converts the fixed-z derivative to the normal-flow one
        const auto gz_all = [&](int ii) {
          return c0[ii] + c1[ii] * std::cos(th) + s1[ii] * std::sin(th);
        };
        const double dgdz = (gz_all(i + 1) - gz_all(i - 1)) / (2.0 * h);
        const double adv = rt * rz[i] / q2 * dgdz;
        worst = std::max(worst, std::abs(lhs - lap - A2 * gval - adv));
      }
    }
  }
  return worst;
}

}  // namespace mcflab
