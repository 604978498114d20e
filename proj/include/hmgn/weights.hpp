#pragma once

// Weight matrices W of the objective ||x - y||_W^2 = (x-y)' W (x-y).
//
// Four representations are supported:
//   identity        W = I
//   banded          W = C'C, C upper triangular with p+1 diagonals
//   banded inverse  W^{-1} = Chat'Chat, Chat upper triangular with p+1 diagonals
//   masked          W = U W0 U, U = diag(observed), W0 one of the above
//
// Every representation exposes a factor F with F'F = W, applied in O(Np).

#include <memory>
#include <optional>
#include <variant>

#include "hmgn/banded.hpp"
#include "hmgn/series.hpp"

namespace hmgn {

enum class WeightKind { Identity, Banded, BandedInverse, Masked };

class WeightSpec {
 public:
  static WeightSpec identity(Index n);
  /// W = C'C from its upper banded Cholesky factor.
  static WeightSpec banded(BandedUpper c);
  /// W^{-1} = Chat'Chat from the upper banded Cholesky factor of W^{-1}.
  static WeightSpec banded_inverse(BandedUpper chat);
  /// Factorizes a symmetric banded W.
  static WeightSpec from_banded_w(const SymBand& w);
  /// Factorizes a symmetric banded W^{-1}.
  static WeightSpec from_banded_w_inverse(const SymBand& w_inverse);

  WeightKind kind() const;
  Index size() const { return n_; }
  /// Band half-width of the stored factor (0 for identity).
  Index bandwidth() const;
  /// True unless some positions are masked out.
  bool positive_definite() const { return kind() != WeightKind::Masked; }

  /// W x
  MatrixXd apply_w(const Eigen::Ref<const MatrixXd>& x) const;
  /// F x with F'F = W (C x, Chat^{-T} x, or C0 U x)
  MatrixXd apply_c(const Eigen::Ref<const MatrixXd>& x) const;
  /// Chat^{-T} x; identity and banded-inverse weights only.
  MatrixXd solve_chat_t(const Eigen::Ref<const MatrixXd>& x) const;
  /// sqrt(x' W x), evaluated as ||F x||.
  double weighted_norm(const Eigen::Ref<const VectorXd>& x) const;

  /// Upper banded factor Chat of W^{-1} = Chat'Chat when W^{-1} is banded
  /// (identity, banded inverse, or diagonal W).
  std::optional<BandedUpper> inverse_factor() const;

  /// Observation mask; all true unless masked.
  Mask mask() const;
  /// The unmasked weight for masked specs, *this otherwise.
  const WeightSpec& unmasked() const;

  MatrixXd to_dense() const;

 private:
  struct Identity {};
  struct Banded {
    BandedUpper c;
  };
  struct BandedInverse {
    BandedUpper chat;
  };
  struct Masked {
    std::shared_ptr<const WeightSpec> inner;
    Mask mask;
  };
  using Variant = std::variant<Identity, Banded, BandedInverse, Masked>;

  WeightSpec(Index n, Variant v) : n_(n), v_(std::move(v)) {}

  Index n_ = 0;
  Variant v_;

  friend WeightSpec mask_missing(const WeightSpec& w0, const Mask& mask);
};

/// W = Sigma^{-1} for a stationary AR(p) process
/// x_t = phi_1 x_{t-1} + ... + phi_p x_{t-p} + e_t, Var(e_t) = sigma2.
/// W is (2p+1)-diagonal and is returned through its banded Cholesky factor.
WeightSpec ar_inverse_covariance(const VectorXd& phi, double sigma2, Index n);

/// W = Sigma^{-1} for an MA(q) process x_t = e_t + theta_1 e_{t-1} + ... ;
/// here W^{-1} = Sigma is (2q+1)-diagonal.
WeightSpec ma_covariance_weights(const VectorXd& theta, double sigma2, Index n);

/// Autocovariances gamma(0..p) of a stationary AR(p) process.
VectorXd ar_autocovariance(const VectorXd& phi, double sigma2);

/// True when all roots of 1 - phi_1 z - ... - phi_p z^p lie outside the unit circle.
bool ar_is_stationary(const VectorXd& phi);

/// W = U W0 U where U zeroes the unobserved positions.
WeightSpec mask_missing(const WeightSpec& w0, const Mask& mask);

inline MatrixXd apply_w(const WeightSpec& w, const Eigen::Ref<const MatrixXd>& x) { return w.apply_w(x); }
inline MatrixXd apply_c(const WeightSpec& w, const Eigen::Ref<const MatrixXd>& x) { return w.apply_c(x); }
inline MatrixXd solve_chat_t(const WeightSpec& w, const Eigen::Ref<const MatrixXd>& x) { return w.solve_chat_t(x); }
inline double weighted_norm(const WeightSpec& w, const Eigen::Ref<const VectorXd>& x) { return w.weighted_norm(x); }

}  // namespace hmgn
