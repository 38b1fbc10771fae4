// numerics.hpp -- small numeric kernels shared across the library:
// difference stencils, quadrature, tridiagonal solves, interpolation,
// root finding, tiny dense least squares, and 3-vector/3x3 helpers.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcflab {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  if (n == 0.0) throw std::domain_error("normalized: zero vector");
  return (1.0 / n) * a;
}

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  double& operator()(int i, int j) { return m[3 * i + j]; }
  double operator()(int i, int j) const { return m[3 * i + j]; }

  Vec3 apply(const Vec3& v) const {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
            m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
  }
  Mat3 transpose() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }
  Mat3 mul(const Mat3& b) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }
  static Mat3 rot_x(double a) {
    Mat3 r;
    double c = std::cos(a), s = std::sin(a);
    r.m = {1, 0, 0, 0, c, -s, 0, s, c};
    return r;
  }
  static Mat3 rot_y(double a) {
    Mat3 r;
    double c = std::cos(a), s = std::sin(a);
    r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
    return r;
  }
  static Mat3 rot_z(double a) {
    Mat3 r;
    double c = std::cos(a), s = std::sin(a);
    r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    return r;
  }
};

// d/dx on a uniform grid, second order: central interior, one-sided ends.
std::vector<double> deriv1(const std::vector<double>& f, double h);
// d2/dx2, second order: central interior, one-sided (4-point) ends.
std::vector<double> deriv2(const std::vector<double>& f, double h);
// fourth-order variants (5-point central, one-sided near the ends); used
// where residual targets sit below what O(h^2) stencils can certify.
std::vector<double> deriv1_o4(const std::vector<double>& f, double h);
std::vector<double> deriv2_o4(const std::vector<double>& f, double h);

// Composite Simpson on a uniform grid (3/8 correction when the interval
// count is odd). n >= 3.
double simpson(const std::vector<double>& f, double h);

// Trapezoid rule for one period of a periodic integrand sampled at n
// equispaced nodes (period = n*h, node n == node 0 not duplicated).
double periodic_trapezoid(const std::vector<double>& f, double h);

// Adaptive Simpson quadrature of f on [a,b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

// Solves tridiagonal system: lower a (a[0] unused), diag b, upper c
// (c[n-1] unused). Overwrites inputs; returns solution in d.
void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                       std::vector<double>& c, std::vector<double>& d);

// Uniform-grid Catmull-Rom interpolation with clamped (one-sided cubic)
// end handling. x is clamped to [lo, lo+(n-1)h].
double catmull_rom(const std::vector<double>& f, double lo, double h, double x);

// Steffen's monotone cubic through (x[i], y[i]) with x strictly increasing.
// No overshoot; evaluate clamps to the data range.
struct MonotoneCubic {
  std::vector<double> x, y, d;  // d: node slopes
  static MonotoneCubic fit(const std::vector<double>& x, const std::vector<double>& y);
  double operator()(double xq) const;
};

// Largest t in [lo, hi] with pred(t) true, assuming pred monotone
// (true then false). pred(lo) must be true.
double bisect_feasible(const std::function<bool(double)>& pred, double lo, double hi,
                       double tol, int max_iter = 200);

// Dense least squares min ||A x - b||_2 via normal equations with partial
// pivoting; A is m x n row-major, m >= n, n small.
std::vector<double> least_squares(const std::vector<double>& A, const std::vector<double>& b,
                                  int m, int n);

// Slope/intercept fit y ~ a + b x; also reports the standard error of b.
struct LineFit {
  double intercept = 0, slope = 0, slope_stderr = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double max_abs(const std::vector<double>& v);

}  // namespace mcflab
