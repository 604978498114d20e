#include "hmgn/projection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hmgn {

namespace {

constexpr double kConditionLimit = 1e12;

}  // namespace

WeightedLeastSquares::WeightedLeastSquares(MatrixXd z, const WeightSpec& w) : z_(std::move(z)), w_(w) {
  if (z_.rows() != w_.size()) throw InvalidArgument("weighted least squares: design and weight sizes differ");
  const Index k = z_.cols();
  if (k == 0) return;
  if (k > z_.rows()) throw RankDeficient("weighted least squares: more columns than rows");
  const MatrixXd fz = w_.apply_c(z_);
  qr_.compute(fz);
  const auto diag = qr_.matrixR().diagonal().cwiseAbs();
  const double largest = diag[0];
  if (!(largest > 0.0)) throw RankDeficient("weighted least squares: weighted design is zero");
  if (diag[k - 1] < largest / kConditionLimit) {
    svd_.emplace(fz, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& s = svd_->singularValues();
    if (!(s[k - 1] >= s[0] / kConditionLimit))
      throw RankDeficient("weighted least squares: weighted design is rank deficient");
  }
}

MatrixXd WeightedLeastSquares::coefficients(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != z_.rows()) throw InvalidArgument("weighted least squares: right-hand side has wrong length");
  if (z_.cols() == 0) return MatrixXd::Zero(0, x.cols());
  const MatrixXd fx = w_.apply_c(x);
  if (svd_) return svd_->solve(fx);
  return qr_.solve(fx);
}

ProjectionResult WeightedLeastSquares::apply(const VectorXd& x) const {
  ProjectionResult out;
  out.coefficients = coefficients(x);
  out.projected = z_ * out.coefficients;
  return out;
}

MatrixXd WeightedLeastSquares::project(const Eigen::Ref<const MatrixXd>& x) const { return z_ * coefficients(x); }

ProjectionResult weighted_pinv_apply(const MatrixXd& z, const WeightSpec& w, const VectorXd& x) {
  return WeightedLeastSquares(z, w).apply(x);
}

GlrrProjector::GlrrProjector(const GlrrVector& a, const WeightSpec& w, HornerMode mode, double rotation_offset)
    : a_(a),
      spectrum_(rotated_spectrum(a, w.size(), mode, rotation_offset)),
      basis_(nullspace_basis(a, spectrum_, mode)),
      ls_(basis_.Z, w) {}

ProjectionResult project_onto_glrr_space(const GlrrVector& a, const WeightSpec& w, const VectorXd& x,
                                         HornerMode mode) {
  if (x.size() != w.size()) throw InvalidArgument("project_onto_glrr_space: dimension mismatch");
  return GlrrProjector(a, w, mode).project(x);
}

GammaFactor::GammaFactor(const GlrrVector& a, const WeightSpec& w) : a_(a) {
  if (!w.positive_definite())
    throw UnsupportedWeights("kernel projection requires a positive definite weight matrix");
  auto chat = w.inverse_factor();
  if (!chat) throw UnsupportedWeights("kernel projection requires a banded inverse weight matrix");
  chat_ = std::move(*chat);

  const Index n = w.size();
  const Index r = a.order();
  if (2 * r >= n) throw InvalidArgument("GammaFactor: order must be below half the series length");
  const Index m = n - r;
  const Index p = chat_.bandwidth();
  const Index h = p + r;
  const VectorXd& c = a.coeffs();

  // Column j of Chat Q(a) is supported on rows j-p .. j+r; row i of that
  // window is stored at b(i - j + p, j).
  MatrixXd b = MatrixXd::Zero(h + 1, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = std::max<Index>(0, j - p); i <= j + r; ++i) {
      double s = 0.0;
      const Index kmax = std::min(i + p, j + r);
      for (Index k = std::max(i, j); k <= kmax; ++k) s += chat_(i, k) * c[k - j];
      b(i - j + p, j) = s;
    }
  }

  SymBand gamma(m, h);
  for (Index j = 0; j < m; ++j) {
    const Index dmax = std::min(h, m - 1 - j);
    for (Index d = 0; d <= dmax; ++d) {
      const Index jj = j + d;
      const Index lo = std::max<Index>(0, jj - p);
      const Index hi = j + r;
      double s = 0.0;
      for (Index i = lo; i <= hi; ++i) s += b(i - j + p, j) * b(i - jj + p, jj);
      gamma.upper(j, jj) = s;
    }
  }
  gamma_c_ = gamma.cholesky();
}

VectorXd GammaFactor::solve(const VectorXd& v) const { return gamma_c_.solve(gamma_c_.solve_transpose(v)); }

VectorXd GammaFactor::apply_w_inverse(const VectorXd& x) const {
  return chat_.multiply_transpose(chat_.multiply(x));
}

VectorXd GammaFactor::project(const VectorXd& x) const {
  if (x.size() != chat_.size()) throw InvalidArgument("GammaFactor::project: dimension mismatch");
  const VectorXd u = solve(glrr_residual(a_.coeffs(), x));
  return x - apply_w_inverse(glrr_adjoint(a_.coeffs(), u));
}

VectorXd project_gamma(const GlrrVector& a, const WeightSpec& w, const VectorXd& x) {
  if (x.size() != w.size()) throw InvalidArgument("project_gamma: dimension mismatch");
  return GammaFactor(a, w).project(x);
}

MatrixXd vp_jacobian(const GammaFactor& gamma, Index pivot, const VectorXd& x) {
  const GlrrVector& a = gamma.glrr();
  const Index n = x.size();
  const Index r = a.order();
  const Index m = n - r;
  if (n != gamma.chat().size()) throw InvalidArgument("vp_jacobian: dimension mismatch");
  if (pivot < 0 || pivot > r) throw InvalidArgument("vp_jacobian: pivot index out of range");

  const VectorXd px = gamma.project(x);
  const VectorXd u = gamma.solve(glrr_residual(a.coeffs(), x));
  const std::vector<Index> free = free_positions(r, pivot);

  MatrixXd jac(n, r);
  for (Index i = 0; i < r; ++i) {
    const Index j = free[static_cast<std::size_t>(i)];
    const VectorXd first = gamma.apply_w_inverse(glrr_adjoint(a.coeffs(), gamma.solve(px.segment(j, m))));
    VectorXd shifted = VectorXd::Zero(n);
    shifted.segment(j, m) = u;
    const VectorXd second = gamma.project(gamma.apply_w_inverse(shifted));
    jac.col(i) = -first - second;
  }
  return jac;
}

MatrixXd vp_jacobian(const GlrrVector& a, Index pivot, const WeightSpec& w, const VectorXd& x) {
  return vp_jacobian(GammaFactor(a, w), pivot, x);
}

}  // namespace hmgn
