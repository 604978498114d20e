#include "hmgn/nullspace.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace hmgn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRotationCandidates = 256;
constexpr int kGoldenIterations = 60;

Eigen::FFT<double>& fft_engine() {
  // kissfft caches twiddles per size; keeping one engine per thread makes
  // that cache safe to use from concurrent fits.
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return engine;
}

MatrixXcd transform_columns(const MatrixXcd& x, bool forward) {
  const Index n = x.rows();
  MatrixXcd y(n, x.cols());
  if (n == 0) return y;
  // The kissfft backend does not handle length-one transforms, which are
  // the identity.
  if (n == 1) return x;
  auto& engine = fft_engine();
  std::vector<cplx> in(static_cast<std::size_t>(n));
  std::vector<cplx> out;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = x(i, c);
    if (forward)
      engine.fwd(out, in);
    else
      engine.inv(out, in);
    for (Index i = 0; i < n; ++i) y(i, c) = out[static_cast<std::size_t>(i)] * scale;
  }
  return y;
}

// Compensated evaluation resolves |g_a| far below eps * ||a||_1 near
// multiple roots, so only values that are zero to working precision squared
// count as singular.
double degeneracy_threshold(const GlrrVector& a) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return eps * eps * a.coeffs().lpNorm<1>();
}

cplx eval_at(const GlrrVector& a, cplx z, HornerMode mode) {
  return mode == HornerMode::Compensated ? comp_horner(a.coeffs(), z) : horner(a.coeffs(), z);
}

double min_abs_on(const GlrrVector& a, Index n, double alpha, const std::vector<Index>& subset, HornerMode mode) {
  double m = std::numeric_limits<double>::infinity();
  for (Index j : subset) m = std::min(m, std::abs(eval_at(a, grid_point(j, n, alpha), mode)));
  return m;
}

// Multiplies row j by exp(i * sign * alpha * j).
void twist_rows(MatrixXcd& x, double alpha, double sign) {
  for (Index j = 0; j < x.rows(); ++j) x.row(j) *= std::polar(1.0, sign * alpha * static_cast<double>(j));
}

}  // namespace

MatrixXcd fourier(const MatrixXcd& x) { return transform_columns(x, true); }
MatrixXcd inverse_fourier(const MatrixXcd& x) { return transform_columns(x, false); }

cplx grid_point(Index j, Index n, double alpha) {
  // Reduce to the representative closest to zero so that points near z = 1
  // carry small angles, which the sine and cosine resolve accurately.
  Index jj = j % n;
  if (jj < 0) jj += n;
  if (2 * jj > n) jj -= n;
  const double theta = 2.0 * kPi * static_cast<double>(jj) / static_cast<double>(n) - alpha;
  return std::polar(1.0, theta);
}

VectorXcd eval_poly_grid(const GlrrVector& a, double alpha, Index n, HornerMode mode) {
  if (n < 1) throw InvalidArgument("eval_poly_grid: grid size must be positive");
  VectorXcd out(n);
  for (Index j = 0; j < n; ++j) out[j] = eval_at(a, grid_point(j, n, alpha), mode);
  return out;
}

double find_rotation(const GlrrVector& a, Index n, double offset, HornerMode mode) {
  if (n < 1) throw InvalidArgument("find_rotation: grid size must be positive");
  if (!(offset >= 0.0 && offset < 1.0)) throw InvalidArgument("find_rotation: offset must lie in [0, 1)");
  const Index r = a.order();
  const double half = kPi / static_cast<double>(n);
  const double step = 2.0 * half / kRotationCandidates;

  // Only grid points close to roots of g_a can attain the minimum, and a
  // rotation moves each point by less than half the grid spacing. Scan a
  // subset of the smallest values at alpha = 0 and verify on the full grid.
  const VectorXd base = eval_poly_grid(a, 0.0, n, mode).cwiseAbs();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Index> all = order;

  Index subset_size = std::min<Index>(n, 4 * (r + 1) + 8);
  for (;;) {
    std::partial_sort(order.begin(), order.begin() + subset_size, order.end(),
                      [&](Index i, Index j) { return base[i] < base[j]; });
    std::vector<Index> subset(order.begin(), order.begin() + subset_size);
    auto objective = [&](double alpha) { return min_abs_on(a, n, alpha, subset, mode); };

    double best_alpha = 0.0;
    double best_value = -1.0;
    for (int m = 0; m < kRotationCandidates; ++m) {
      const double alpha = -half + (m + 1 - offset) * step;
      const double v = objective(alpha);
      if (v > best_value) {
        best_value = v;
        best_alpha = alpha;
      }
    }

    // Golden-section refinement on the bracket around the best candidate.
    double lo = std::max(best_alpha - step, -half);
    double hi = std::min(best_alpha + step, half);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < kGoldenIterations; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = objective(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = objective(x1);
      }
    }
    const double refined = f1 > f2 ? x1 : x2;
    const double refined_value = std::max(f1, f2);
    if (refined_value > best_value && refined > -half && refined <= half) {
      best_alpha = refined;
      best_value = refined_value;
    }

    const double full = min_abs_on(a, n, best_alpha, all, mode);
    if (full >= best_value || subset_size == n) {
      if (!(full > degeneracy_threshold(a)))
        throw SpectrumDegenerate("find_rotation: polynomial vanishes on every rotated grid");
      return best_alpha;
    }
    subset_size = std::min(n, 2 * subset_size);
  }
}

RotatedSpectrum rotated_spectrum_at(const GlrrVector& a, Index n, double alpha, HornerMode mode) {
  RotatedSpectrum s;
  s.alpha0 = alpha;
  s.n = n;
  s.r = a.order();
  s.eigenvalues = eval_poly_grid(a, alpha, n, mode);
  if (!(s.min_abs() > degeneracy_threshold(a)))
    throw SpectrumDegenerate("rotated circulant is numerically singular");
  return s;
}

RotatedSpectrum rotated_spectrum(const GlrrVector& a, Index n, HornerMode mode, double offset) {
  return rotated_spectrum_at(a, n, find_rotation(a, n, offset, mode), mode);
}

SubspaceBasis nullspace_basis(const GlrrVector& a, Index n, HornerMode mode) {
  return nullspace_basis(a, rotated_spectrum(a, n, mode), mode);
}

SubspaceBasis nullspace_basis(const GlrrVector& a, const RotatedSpectrum& spectrum, HornerMode mode) {
  const Index n = spectrum.n;
  const Index r = a.order();
  if (r != spectrum.r) throw InvalidArgument("nullspace_basis: spectrum belongs to a different order");
  if (2 * r >= n) throw InvalidArgument("nullspace_basis: order must be below half the series length");
  SubspaceBasis out;
  out.alpha0 = spectrum.alpha0;
  if (r == 0) {
    out.Z = MatrixXd::Zero(n, 0);
    return out;
  }

  // Columns of the inverse circulant that hit the last r coordinates, in the
  // Fourier domain: L = A^{-1} R with R(k, m) = w_k^{r-m} / sqrt(n).
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  MatrixXcd l(n, r);
  for (Index k = 0; k < n; ++k)
    for (Index m = 0; m < r; ++m)
      l(k, m) = grid_point((k * (r - m)) % n, n, 0.0) * inv_sqrt_n / spectrum.eigenvalues[k];

  Eigen::JacobiSVD<MatrixXcd> svd(l, Eigen::ComputeThinU | Eigen::ComputeThinV);
  MatrixXcd u;
  if (mode == HornerMode::Plain) {
    u = svd.matrixU();
  } else {
    // U = A^{-1} R O with O = V S^{-1}; each entry of R O is a polynomial in
    // w_k and is evaluated by compensated Horner.
    const MatrixXcd o = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal();
    u.resize(n, r);
    VectorXcd coeffs(r + 1);
    for (Index c = 0; c < r; ++c) {
      coeffs[0] = 0.0;
      for (Index d = 1; d <= r; ++d) coeffs[d] = o(r - d, c);
      for (Index k = 0; k < n; ++k)
        u(k, c) = comp_horner(coeffs, grid_point(k, n, 0.0)) * inv_sqrt_n / spectrum.eigenvalues[k];
    }
  }

  MatrixXcd zc = inverse_fourier(u);
  twist_rows(zc, spectrum.alpha0, -1.0);

  // Zc spans the complexification of the real space Z(a); an orthonormal
  // basis of its real and imaginary parts has exactly r unit singular values.
  MatrixXd parts(n, 2 * r);
  parts << zc.real(), zc.imag();
  Eigen::JacobiSVD<MatrixXd> real_svd(parts, Eigen::ComputeThinU);
  out.Z = real_svd.matrixU().leftCols(r);
  const VectorXd& sv = real_svd.singularValues();
  out.leakage = sv[r] / sv[0];

  double res2 = 0.0;
  for (Index c = 0; c < r; ++c) res2 += glrr_residual(a.coeffs(), out.Z.col(c)).squaredNorm();
  out.nullspace_residual = std::sqrt(res2);
  return out;
}

MatrixXcd circulant_solve(const RotatedSpectrum& spectrum, const MatrixXcd& v) {
  if (v.rows() != spectrum.n) throw InvalidArgument("circulant_solve: dimension mismatch");
  MatrixXcd y = fourier(v);
  y.array().colwise() /= spectrum.eigenvalues.array();
  return inverse_fourier(y);
}

MatrixXd fhat_matrix(const RotatedSpectrum& spectrum, const VectorXd& s, Index pivot) {
  const Index n = spectrum.n;
  const Index r = spectrum.r;
  if (s.size() != n) throw InvalidArgument("fhat_matrix: series length differs from spectrum size");
  if (pivot < 0 || pivot > r) throw InvalidArgument("fhat_matrix: pivot index out of range");
  const std::vector<Index> free = free_positions(r, pivot);
  MatrixXcd v = MatrixXcd::Zero(n, r);
  for (Index i = 0; i < r; ++i) v.col(i).head(n - r) = -s.segment(free[static_cast<std::size_t>(i)], n - r).cast<cplx>();
  twist_rows(v, spectrum.alpha0, 1.0);
  MatrixXcd y = circulant_solve(spectrum, v);
  twist_rows(y, spectrum.alpha0, -1.0);
  // Q(a) is real, so the real part solves the same system.
  return y.real();
}

MatrixXd fhat_matrix(const GlrrVector& a, const VectorXd& s, Index pivot, HornerMode mode) {
  return fhat_matrix(rotated_spectrum(a, s.size(), mode), s, pivot);
}

}  // namespace hmgn
