#pragma once

// Time series values, Hankel embedding and algebra of generalized linear
// recurrence relations (GLRR).
//
// Indices are 1-based in prose and zero-based in code: a GLRR pivot `tau`
// documented as "position 2" is stored as 1.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "hmgn/errors.hpp"

namespace hmgn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Real series of length N with an observation mask (true = observed).
/// Values at unobserved positions are stored as 0 and never enter an objective.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(VectorXd values);
  TimeSeries(VectorXd values, Mask mask);

  /// Builds a series where NaN entries mark missing observations.
  static TimeSeries from_nan_coded(const VectorXd& raw);

  Index size() const { return values_.size(); }
  const VectorXd& values() const { return values_; }
  const Mask& mask() const { return mask_; }
  bool fully_observed() const { return mask_.all(); }
  Index observed_count() const { return mask_.count(); }

  /// Values with NaN at unobserved positions.
  VectorXd nan_coded() const;

 private:
  VectorXd values_;
  Mask mask_;
};

/// Coefficient vector a of GLRR(a): a' T_{r+1}(S) = 0. Never the zero vector.
class GlrrVector {
 public:
  GlrrVector() = default;
  explicit GlrrVector(VectorXd coeffs);
  GlrrVector(std::initializer_list<double> coeffs);

  Index order() const { return coeffs_.size() - 1; }
  const VectorXd& coeffs() const { return coeffs_; }
  double operator[](Index i) const { return coeffs_[i]; }

 private:
  VectorXd coeffs_;
};

/// Local coordinates of a GLRR: pivot position with a_pivot = -1 and the r
/// remaining coefficients in their original order.
struct NormalizedGlrr {
  Index pivot = 0;  // zero-based
  VectorXd adot;
};

/// Trajectory (Hankel) matrix T_L(s): entry (i, j) = s[i + j].
template <typename Derived>
MatrixXd embed(const Eigen::MatrixBase<Derived>& s, Index window) {
  const Index n = s.size();
  if (window < 1 || window > n) throw InvalidArgument("embed: window length out of range");
  MatrixXd t(window, n - window + 1);
  for (Index j = 0; j < t.cols(); ++j) t.col(j) = s.segment(j, window);
  return t;
}

inline MatrixXd embed(const TimeSeries& s, Index window) { return embed(s.values(), window); }

/// Q(a)' s, component i = sum_j a_j s_{i+j}. Zero exactly when s obeys GLRR(a).
template <typename DerivedA, typename DerivedS>
Eigen::Matrix<typename DerivedS::Scalar, Eigen::Dynamic, 1> glrr_residual(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedS>& s) {
  using Scalar = typename DerivedS::Scalar;
  const Index r = a.size() - 1;
  const Index n = s.size();
  if (r < 0 || r >= n) throw InvalidArgument("glrr_residual: order too large for series");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n - r);
  for (Index k = 0; k <= r; ++k) out += Scalar(a[k]) * s.segment(k, n - r);
  return out;
}

inline VectorXd glrr_residual(const TimeSeries& s, const GlrrVector& a) {
  return glrr_residual(a.coeffs(), s.values());
}

/// Q(a) u for u of length N-r: the adjoint of glrr_residual.
template <typename DerivedA, typename DerivedU>
Eigen::Matrix<typename DerivedU::Scalar, Eigen::Dynamic, 1> glrr_adjoint(const Eigen::MatrixBase<DerivedA>& a,
                                                                        const Eigen::MatrixBase<DerivedU>& u) {
  using Scalar = typename DerivedU::Scalar;
  const Index r = a.size() - 1;
  const Index m = u.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(m + r);
  for (Index k = 0; k <= r; ++k) out.segment(k, m) += Scalar(a[k]) * u;
  return out;
}

/// Dense Q^{M,d}(b): M x (M-d), column j holds b at rows j..j+d.
template <typename Derived>
MatrixXd build_q_matrix(const Eigen::MatrixBase<Derived>& b, Index rows) {
  const Index d = b.size() - 1;
  if (d < 0 || rows <= d) throw InvalidArgument("build_q_matrix: size must exceed polynomial degree");
  MatrixXd q = MatrixXd::Zero(rows, rows - d);
  for (Index j = 0; j < q.cols(); ++j) q.col(j).segment(j, d + 1) = b;
  return q;
}

/// Coefficients of g_a(z)^2, length 2r+1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> acyclic_self_convolution(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Index m = a.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(2 * m - 1);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) out[i + j] += a[i] * a[j];
  return out;
}

inline GlrrVector acyclic_self_convolution(const GlrrVector& a) {
  return GlrrVector(acyclic_self_convolution(a.coeffs()));
}

/// Scales a so that its largest-magnitude entry (the first one on ties)
/// equals -1, then drops that entry. The scale factor is negative when that
/// entry is positive; GLRR(a) is unchanged either way.
NormalizedGlrr normalize_glrr(const GlrrVector& a);

/// Inverse of normalize_glrr up to scale: inserts -1 at `pivot`.
GlrrVector h_tau(const VectorXd& adot, Index pivot);
inline GlrrVector h_tau(const NormalizedGlrr& n) { return h_tau(n.adot, n.pivot); }

/// The r positions of a that are free coordinates for a given pivot, i.e.
/// {0..r} without `pivot`.
std::vector<Index> free_positions(Index order, Index pivot);

/// One term P(n) exp(alpha n) sin(2 pi omega n + phi) of a parametric signal.
/// `poly` holds polynomial coefficients in increasing degree.
struct SignalComponent {
  VectorXd poly;
  double alpha = 0.0;
  double omega = 0.0;
  double phi = 0.0;
};

/// s_n = sum_k P_k(n) exp(alpha_k n) sin(2 pi omega_k n + phi_k), n = 1..N.
TimeSeries generate_model_signal(std::span<const SignalComponent> components, Index length);

/// Rank of the signal above for long enough series: sum (deg P_k + 1) r_k with
/// r_k = 2 for 0 < omega_k < 0.5 and 1 otherwise.
Index model_rank(std::span<const SignalComponent> components);

}  // namespace hmgn
