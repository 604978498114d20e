#pragma once

// Band storage for the two shapes that appear in weighted projections:
// upper-triangular factors with p+1 diagonals and symmetric matrices with
// 2p+1 diagonals. Both store diagonal k in row k of a (p+1) x N array, so
// entry (i, i+k) lives at band(k, i).

#include <Eigen/Core>

#include "hmgn/errors.hpp"

namespace hmgn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class BandedUpper {
 public:
  BandedUpper() = default;
  BandedUpper(Index n, Index bandwidth);

  /// Identity-like diagonal factor.
  static BandedUpper diagonal(const VectorXd& d);
  static BandedUpper from_dense(const MatrixXd& u, Index bandwidth);

  Index size() const { return n_; }
  Index bandwidth() const { return p_; }

  double& at(Index i, Index j) { return band_(j - i, i); }
  double operator()(Index i, Index j) const {
    return (j < i || j - i > p_) ? 0.0 : band_(j - i, i);
  }

  /// U x
  MatrixXd multiply(const Eigen::Ref<const MatrixXd>& x) const;
  /// U' x
  MatrixXd multiply_transpose(const Eigen::Ref<const MatrixXd>& x) const;
  /// U^{-1} x
  MatrixXd solve(const Eigen::Ref<const MatrixXd>& x) const;
  /// U^{-T} x
  MatrixXd solve_transpose(const Eigen::Ref<const MatrixXd>& x) const;

  MatrixXd to_dense() const;

 private:
  Index n_ = 0;
  Index p_ = 0;
  MatrixXd band_;
};

class SymBand {
 public:
  SymBand() = default;
  SymBand(Index n, Index half_bandwidth);

  static SymBand from_dense(const MatrixXd& a, Index half_bandwidth);

  Index size() const { return n_; }
  Index bandwidth() const { return p_; }

  /// Entry (i, j) with i <= j <= i + p.
  double& upper(Index i, Index j) { return band_(j - i, i); }
  double operator()(Index i, Index j) const {
    if (j < i) std::swap(i, j);
    return j - i > p_ ? 0.0 : band_(j - i, i);
  }

  MatrixXd multiply(const Eigen::Ref<const MatrixXd>& x) const;
  MatrixXd to_dense() const;

  /// Banded Cholesky A = U'U. Throws NotPositiveDefinite on a non-positive pivot.
  BandedUpper cholesky() const;

 private:
  Index n_ = 0;
  Index p_ = 0;
  MatrixXd band_;
};

/// U'U as a symmetric band matrix.
SymBand gram(const BandedUpper& u);

}  // namespace hmgn
