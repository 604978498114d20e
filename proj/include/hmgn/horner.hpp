#pragma once

// Polynomial evaluation at complex points, plain and compensated.
//
// The compensated scheme carries the exact rounding error of every product
// and sum (error-free transformations) in a second accumulator that is run
// through the same Horner recurrence. The result is as accurate as plain
// Horner evaluated in twice the working precision, then rounded once.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <type_traits>

namespace hmgn {

using cplx = std::complex<double>;

/// a + b = s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double z = s - a;
  e = (a - (s - z)) + (b - z);
}

/// a * b = p + e exactly (requires a correctly rounded fused multiply-add).
inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

namespace detail {

inline double re(double x) { return x; }
inline double im(double) { return 0.0; }
inline double re(const cplx& x) { return x.real(); }
inline double im(const cplx& x) { return x.imag(); }

}  // namespace detail

/// sum_k c[k] z^k by Horner's rule, c in increasing degree.
template <typename Derived>
cplx horner(const Eigen::MatrixBase<Derived>& c, cplx z) {
  const Eigen::Index n = c.size();
  if (n == 0) return {0.0, 0.0};
  cplx s = cplx(c[n - 1]);
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    const double sr = s.real() * z.real() - s.imag() * z.imag() + detail::re(c[k]);
    const double si = s.real() * z.imag() + s.imag() * z.real() + detail::im(c[k]);
    s = {sr, si};
  }
  return s;
}

/// Compensated Horner for real or complex coefficients at a complex point.
template <typename Derived>
cplx comp_horner(const Eigen::MatrixBase<Derived>& c, cplx z) {
  const Eigen::Index n = c.size();
  if (n == 0) return {0.0, 0.0};
  const double zr = z.real();
  const double zi = z.imag();
  double sr = detail::re(c[n - 1]);
  double si = detail::im(c[n - 1]);
  double cr = 0.0;
  double ci = 0.0;
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    double p1, e1, p2, e2, p3, e3, p4, e4;
    two_prod(sr, zr, p1, e1);
    two_prod(si, zi, p2, e2);
    two_prod(sr, zi, p3, e3);
    two_prod(si, zr, p4, e4);
    double p5, e5, p6, e6;
    two_sum(p1, -p2, p5, e5);
    two_sum(p3, p4, p6, e6);
    double e7, e8;
    two_sum(p5, detail::re(c[k]), sr, e7);
    two_sum(p6, detail::im(c[k]), si, e8);
    const double err_r = ((e1 - e2) + e5) + e7;
    const double err_i = ((e3 + e4) + e6) + e8;
    const double nr = cr * zr - ci * zi + err_r;
    const double ni = cr * zi + ci * zr + err_i;
    cr = nr;
    ci = ni;
  }
  return {sr + cr, si + ci};
}

}  // namespace hmgn
