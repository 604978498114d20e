#pragma once

// Weighted projections onto Z(a).
//
// Two routes compute Pi x = argmin_{s in Z(a)} ||x - s||_W:
//  * the image route, from an orthonormal basis Z of Z(a) and a least-squares
//    solve with the factor F of W (F'F = W);
//  * the kernel route, Pi = I - W^{-1} Q (Q' W^{-1} Q)^{-1} Q', which needs a
//    banded W^{-1} and factors the banded Gram matrix Gamma = Q' W^{-1} Q.

#include <Eigen/QR>
#include <Eigen/SVD>

#include <optional>

#include "hmgn/nullspace.hpp"
#include "hmgn/weights.hpp"

namespace hmgn {

struct ProjectionResult {
  VectorXd projected;
  /// Coordinates of `projected` in the basis used.
  VectorXd coefficients;
};

/// min_q ||x - Z q||_W for a fixed design Z, factored once and reused for
/// many right-hand sides.
class WeightedLeastSquares {
 public:
  WeightedLeastSquares(MatrixXd z, const WeightSpec& w);

  MatrixXd coefficients(const Eigen::Ref<const MatrixXd>& x) const;
  ProjectionResult apply(const VectorXd& x) const;
  /// Z q for every column of x.
  MatrixXd project(const Eigen::Ref<const MatrixXd>& x) const;

  const MatrixXd& design() const { return z_; }
  /// True when the pivoted QR was judged too ill-conditioned and an SVD is used.
  bool uses_svd() const { return svd_.has_value(); }

 private:
  MatrixXd z_;
  WeightSpec w_;
  Eigen::ColPivHouseholderQR<MatrixXd> qr_;
  std::optional<Eigen::JacobiSVD<MatrixXd>> svd_;
};

ProjectionResult weighted_pinv_apply(const MatrixXd& z, const WeightSpec& w, const VectorXd& x);

/// Basis of Z(a) plus a factored least-squares problem; projects many vectors
/// onto Z(a) at the cost of one basis construction.
class GlrrProjector {
 public:
  GlrrProjector(const GlrrVector& a, const WeightSpec& w, HornerMode mode, double rotation_offset = 0.0);

  const GlrrVector& glrr() const { return a_; }
  const RotatedSpectrum& spectrum() const { return spectrum_; }
  const SubspaceBasis& basis() const { return basis_; }

  ProjectionResult project(const VectorXd& x) const { return ls_.apply(x); }
  MatrixXd project_columns(const Eigen::Ref<const MatrixXd>& x) const { return ls_.project(x); }

 private:
  GlrrVector a_;
  RotatedSpectrum spectrum_;
  SubspaceBasis basis_;
  WeightedLeastSquares ls_;
};

ProjectionResult project_onto_glrr_space(const GlrrVector& a, const WeightSpec& w, const VectorXd& x,
                                         HornerMode mode = HornerMode::Plain);

/// Banded Cholesky factor of Gamma(a) = Q(a)' W^{-1} Q(a) with W^{-1} = Chat'Chat.
class GammaFactor {
 public:
  /// Throws UnsupportedWeights unless W^{-1} has a banded factor, and
  /// NotPositiveDefinite when the factorization breaks down.
  GammaFactor(const GlrrVector& a, const WeightSpec& w);

  const GlrrVector& glrr() const { return a_; }
  const BandedUpper& factor() const { return gamma_c_; }
  const BandedUpper& chat() const { return chat_; }

  /// Gamma^{-1} v
  VectorXd solve(const VectorXd& v) const;
  /// W^{-1} x
  VectorXd apply_w_inverse(const VectorXd& x) const;
  /// (I - W^{-1} Q Gamma^{-1} Q') x
  VectorXd project(const VectorXd& x) const;

 private:
  GlrrVector a_;
  BandedUpper chat_;
  BandedUpper gamma_c_;
};

VectorXd project_gamma(const GlrrVector& a, const WeightSpec& w, const VectorXd& x);

/// Jacobian of adot -> Pi_{Z(H_pivot(adot)),W} x; column i is the derivative
/// with respect to the coefficient at position K(pivot)_i.
MatrixXd vp_jacobian(const GammaFactor& gamma, Index pivot, const VectorXd& x);
MatrixXd vp_jacobian(const GlrrVector& a, Index pivot, const WeightSpec& w, const VectorXd& x);

}  // namespace hmgn
