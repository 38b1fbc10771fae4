#include "mcflab/numerics.hpp"

#include <algorithm>
#include <cassert>

namespace mcflab {

std::vector<double> deriv1(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 3) throw std::invalid_argument("deriv1: need n >= 3");
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> deriv2(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 4) throw std::invalid_argument("deriv2: need n >= 4");
  std::vector<double> d(n);
  const double h2 = h * h;
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return d;
}

std::vector<double> deriv1_o4(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 6) return deriv1(f, h);
  std::vector<double> d(n);
  auto fwd = [&](int i, int s) {
    return s * (-25.0 * f[i] + 48.0 * f[i + s] - 36.0 * f[i + 2 * s] + 16.0 * f[i + 3 * s] -
                3.0 * f[i + 4 * s]) /
           (12.0 * h);
  };
  auto semi = [&](int i, int s) {
    return s * (-3.0 * f[i - s] - 10.0 * f[i] + 18.0 * f[i + s] - 6.0 * f[i + 2 * s] +
                f[i + 3 * s]) /
           (12.0 * h);
  };
  d[0] = fwd(0, 1);
  d[1] = semi(1, 1);
  for (int i = 2; i + 2 < n; ++i)
    d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
  d[n - 2] = semi(n - 2, -1);
  d[n - 1] = fwd(n - 1, -1);
  return d;
}

std::vector<double> deriv2_o4(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 7) return deriv2(f, h);
  std::vector<double> d(n);
  const double h2 = h * h;
  auto fwd = [&](int i, int s) {
    return (45.0 * f[i] - 154.0 * f[i + s] + 214.0 * f[i + 2 * s] - 156.0 * f[i + 3 * s] +
            61.0 * f[i + 4 * s] - 10.0 * f[i + 5 * s]) /
           (12.0 * h2);
  };
  auto semi = [&](int i, int s) {
    return (10.0 * f[i - s] - 15.0 * f[i] - 4.0 * f[i + s] + 14.0 * f[i + 2 * s] -
            6.0 * f[i + 3 * s] + f[i + 4 * s]) /
           (12.0 * h2);
  };
  d[0] = fwd(0, 1);
  d[1] = semi(1, 1);
  for (int i = 2; i + 2 < n; ++i)
    d[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) /
           (12.0 * h2);
  d[n - 2] = semi(n - 2, -1);
  d[n - 1] = fwd(n - 1, -1);
  return d;
}

double simpson(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 3) throw std::invalid_argument("simpson: need n >= 3");
  int m = n;  // nodes used by the plain composite rule
  double tail = 0.0;
  if ((n - 1) % 2 != 0) {
    // odd interval count: 3/8 rule on the last three intervals
    if (n < 5) {  // single 3/8 panel
      return 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
    }
    m = n - 3;
    tail = 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
  }
  double s = f[0] + f[m - 1];
  for (int i = 1; i < m - 1; i += 2) s += 4.0 * f[i];
  for (int i = 2; i < m - 1; i += 2) s += 2.0 * f[i];
  return s * h / 3.0 + tail;
}

double periodic_trapezoid(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * h;
}

namespace {
double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                       std::vector<double>& c, std::vector<double>& d) {
  const int n = static_cast<int>(b.size());
  for (int i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (int i = n - 2; i >= 0; --i) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

double catmull_rom(const std::vector<double>& f, double lo, double h, double x) {
  const int n = static_cast<int>(f.size());
  if (n < 2) throw std::invalid_argument("catmull_rom: need n >= 2");
  double s = (x - lo) / h;
  s = std::clamp(s, 0.0, double(n - 1));
  int i = std::min(int(std::floor(s)), n - 2);
  const double t = s - i;
  auto at = [&](int k) { return f[std::clamp(k, 0, n - 1)]; };
  // one-sided slope extension at the ends
  const double fm1 = (i == 0) ? 3.0 * f[0] - 3.0 * f[1] + f[std::min(2, n - 1)] : at(i - 1);
  const double fp2 = (i + 2 > n - 1) ? 3.0 * f[n - 1] - 3.0 * f[n - 2] + f[std::max(n - 3, 0)]
                                     : at(i + 2);
  const double f0 = f[i], f1 = f[i + 1];
  const double a0 = -0.5 * fm1 + 1.5 * f0 - 1.5 * f1 + 0.5 * fp2;
  const double a1 = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * fp2;
  const double a2 = -0.5 * fm1 + 0.5 * f1;
  return ((a0 * t + a1) * t + a2) * t + f0;
}

MonotoneCubic MonotoneCubic::fit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw std::invalid_argument("MonotoneCubic: bad sizes");
  MonotoneCubic mc;
  mc.x = x;
  mc.y = y;
  mc.d.assign(n, 0.0);
  std::vector<double> s(n - 1), hseg(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    hseg[i] = x[i + 1] - x[i];
    if (hseg[i] <= 0) throw std::invalid_argument("MonotoneCubic: x not increasing");
    s[i] = (y[i + 1] - y[i]) / hseg[i];
  }
  mc.d[0] = s[0];
  mc.d[n - 1] = s[n - 2];
  for (int i = 1; i < n - 1; ++i) {
    if (s[i - 1] * s[i] <= 0) {
      mc.d[i] = 0.0;
    } else {
      const double p = (s[i - 1] * hseg[i] + s[i] * hseg[i - 1]) / (hseg[i - 1] + hseg[i]);
      const double lim = 2.0 * std::min(std::abs(s[i - 1]), std::abs(s[i]));
      mc.d[i] = (std::abs(p) > lim) ? (p > 0 ? lim : -lim) : p;
    }
  }
  return mc;
}

double MonotoneCubic::operator()(double xq) const {
  const int n = static_cast<int>(x.size());
  xq = std::clamp(xq, x.front(), x.back());
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (x[mid] <= xq ? lo : hi) = mid;
  }
  const double hseg = x[lo + 1] - x[lo];
  const double t = (xq - x[lo]) / hseg;
  const double y0 = y[lo], y1 = y[lo + 1], d0 = d[lo] * hseg, d1 = d[lo + 1] * hseg;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * d1;
}

double bisect_feasible(const std::function<bool(double)>& pred, double lo, double hi,
                       double tol, int max_iter) {
  if (!pred(lo)) throw std::domain_error("bisect_feasible: pred(lo) false");
  if (pred(hi)) return hi;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<double> least_squares(const std::vector<double>& A, const std::vector<double>& b,
                                  int m, int n) {
  if (static_cast<int>(A.size()) != m * n || static_cast<int>(b.size()) != m)
    throw std::invalid_argument("least_squares: bad sizes");
  // normal equations N x = r
  std::vector<double> N(n * n, 0.0), r(n, 0.0);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      r[i] += A[k * n + i] * b[k];
      for (int j = 0; j < n; ++j) N[i * n + j] += A[k * n + i] * A[k * n + j];
    }
  }
  // Gaussian elimination with partial pivoting
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(N[i * n + col]) > std::abs(N[best * n + col])) best = i;
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(N[col * n + j], N[best * n + j]);
      std::swap(r[col], r[best]);
    }
    const double p = N[col * n + col];
    if (std::abs(p) < 1e-300) throw std::runtime_error("least_squares: singular system");
    for (int i = col + 1; i < n; ++i) {
      const double w = N[i * n + col] / p;
      for (int j = col; j < n; ++j) N[i * n + j] -= w * N[col * n + j];
      r[i] -= w * r[col];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = r[i];
    for (int j = i + 1; j < n; ++j) s -= N[i * n + j] * x[j];
    x[i] = s / N[i * n + i];
  }
  return x;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw std::invalid_argument("fit_line: bad sizes");
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  if (sxx == 0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ss += e * e;
  }
  if (n > 2) fit.slope_stderr = std::sqrt(ss / (n - 2) / sxx);
  return fit;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double w : v) m = std::max(m, std::abs(w));
  return m;
}

}  // namespace mcflab
