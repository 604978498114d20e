#include "hmgn/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hmgn {

BandedUpper::BandedUpper(Index n, Index bandwidth)
    : n_(n), p_(std::min(bandwidth, std::max<Index>(n - 1, 0))), band_(MatrixXd::Zero(p_ + 1, n)) {
  if (n < 1 || bandwidth < 0) throw InvalidArgument("BandedUpper: invalid dimensions");
}

BandedUpper BandedUpper::diagonal(const VectorXd& d) {
  BandedUpper u(d.size(), 0);
  u.band_.row(0) = d.transpose();
  return u;
}

BandedUpper BandedUpper::from_dense(const MatrixXd& u, Index bandwidth) {
  BandedUpper out(u.rows(), bandwidth);
  for (Index k = 0; k <= out.p_; ++k)
    for (Index i = 0; i + k < out.n_; ++i) out.band_(k, i) = u(i, i + k);
  return out;
}

MatrixXd BandedUpper::multiply(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("BandedUpper::multiply: dimension mismatch");
  MatrixXd y = MatrixXd::Zero(n_, x.cols());
  for (Index k = 0; k <= p_; ++k) {
    const Index len = n_ - k;
    y.topRows(len).array() +=
        x.middleRows(k, len).array().colwise() * band_.row(k).head(len).transpose().array();
  }
  return y;
}

MatrixXd BandedUpper::multiply_transpose(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("BandedUpper::multiply_transpose: dimension mismatch");
  MatrixXd y = MatrixXd::Zero(n_, x.cols());
  for (Index k = 0; k <= p_; ++k) {
    const Index len = n_ - k;
    y.middleRows(k, len).array() +=
        x.topRows(len).array().colwise() * band_.row(k).head(len).transpose().array();
  }
  return y;
}

MatrixXd BandedUpper::solve(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("BandedUpper::solve: dimension mismatch");
  MatrixXd y = x;
  for (Index c = 0; c < y.cols(); ++c) {
    for (Index i = n_ - 1; i >= 0; --i) {
      double acc = y(i, c);
      const Index kmax = std::min(p_, n_ - 1 - i);
      for (Index k = 1; k <= kmax; ++k) acc -= band_(k, i) * y(i + k, c);
      y(i, c) = acc / band_(0, i);
    }
  }
  return y;
}

MatrixXd BandedUpper::solve_transpose(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("BandedUpper::solve_transpose: dimension mismatch");
  MatrixXd y = x;
  for (Index c = 0; c < y.cols(); ++c) {
    for (Index j = 0; j < n_; ++j) {
      double acc = y(j, c);
      const Index kmax = std::min(p_, j);
      for (Index k = 1; k <= kmax; ++k) acc -= band_(k, j - k) * y(j - k, c);
      y(j, c) = acc / band_(0, j);
    }
  }
  return y;
}

MatrixXd BandedUpper::to_dense() const {
  MatrixXd u = MatrixXd::Zero(n_, n_);
  for (Index k = 0; k <= p_; ++k)
    for (Index i = 0; i + k < n_; ++i) u(i, i + k) = band_(k, i);
  return u;
}

SymBand::SymBand(Index n, Index half_bandwidth)
    : n_(n), p_(std::min(half_bandwidth, std::max<Index>(n - 1, 0))), band_(MatrixXd::Zero(p_ + 1, n)) {
  if (n < 1 || half_bandwidth < 0) throw InvalidArgument("SymBand: invalid dimensions");
}

SymBand SymBand::from_dense(const MatrixXd& a, Index half_bandwidth) {
  SymBand out(a.rows(), half_bandwidth);
  for (Index k = 0; k <= out.p_; ++k)
    for (Index i = 0; i + k < out.n_; ++i) out.band_(k, i) = a(i, i + k);
  return out;
}

MatrixXd SymBand::multiply(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("SymBand::multiply: dimension mismatch");
  MatrixXd y = x.array().colwise() * band_.row(0).transpose().array();
  for (Index k = 1; k <= p_; ++k) {
    const Index len = n_ - k;
    const auto d = band_.row(k).head(len).transpose().array();
    y.topRows(len).array() += x.middleRows(k, len).array().colwise() * d;
    y.middleRows(k, len).array() += x.topRows(len).array().colwise() * d;
  }
  return y;
}

MatrixXd SymBand::to_dense() const {
  MatrixXd a = MatrixXd::Zero(n_, n_);
  for (Index k = 0; k <= p_; ++k)
    for (Index i = 0; i + k < n_; ++i) a(i, i + k) = a(i + k, i) = band_(k, i);
  return a;
}

BandedUpper SymBand::cholesky() const {
  BandedUpper u(n_, p_);
  for (Index j = 0; j < n_; ++j) {
    double d = band_(0, j);
    for (Index k = std::max<Index>(0, j - p_); k < j; ++k) d -= u(k, j) * u(k, j);
    if (!(d > 0.0))
      throw NotPositiveDefinite("banded Cholesky: non-positive pivot at row " + std::to_string(j));
    const double ujj = std::sqrt(d);
    u.at(j, j) = ujj;
    const Index lmax = std::min(n_ - 1, j + p_);
    for (Index l = j + 1; l <= lmax; ++l) {
      double v = band_(l - j, j);
      for (Index k = std::max<Index>(0, l - p_); k < j; ++k) v -= u(k, j) * u(k, l);
      u.at(j, l) = v / ujj;
    }
  }
  return u;
}

SymBand gram(const BandedUpper& u) {
  const Index n = u.size();
  const Index p = u.bandwidth();
  SymBand a(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j <= std::min(n - 1, i + p); ++j) {
      double s = 0.0;
      for (Index k = std::max<Index>(0, j - p); k <= i; ++k) s += u(k, i) * u(k, j);
      a.upper(i, j) = s;
    }
  return a;
}

}  // namespace hmgn
