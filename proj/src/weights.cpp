#include "hmgn/weights.hpp"

#include <Eigen/LU>

#include <cmath>

namespace hmgn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

MatrixXd mask_rows(const Mask& mask, const Eigen::Ref<const MatrixXd>& x) {
  MatrixXd y = x;
  for (Index i = 0; i < y.rows(); ++i)
    if (!mask[i]) y.row(i).setZero();
  return y;
}

}  // namespace

WeightSpec WeightSpec::identity(Index n) {
  if (n < 1) throw InvalidArgument("WeightSpec: dimension must be positive");
  return WeightSpec(n, Identity{});
}

WeightSpec WeightSpec::banded(BandedUpper c) {
  const Index n = c.size();
  return WeightSpec(n, Banded{std::move(c)});
}

WeightSpec WeightSpec::banded_inverse(BandedUpper chat) {
  const Index n = chat.size();
  return WeightSpec(n, BandedInverse{std::move(chat)});
}

WeightSpec WeightSpec::from_banded_w(const SymBand& w) { return banded(w.cholesky()); }

WeightSpec WeightSpec::from_banded_w_inverse(const SymBand& w_inverse) {
  return banded_inverse(w_inverse.cholesky());
}

WeightKind WeightSpec::kind() const {
  return std::visit(Overloaded{[](const Identity&) { return WeightKind::Identity; },
                               [](const Banded&) { return WeightKind::Banded; },
                               [](const BandedInverse&) { return WeightKind::BandedInverse; },
                               [](const Masked&) { return WeightKind::Masked; }},
                    v_);
}

Index WeightSpec::bandwidth() const {
  return std::visit(Overloaded{[](const Identity&) -> Index { return 0; },
                               [](const Banded& b) { return b.c.bandwidth(); },
                               [](const BandedInverse& b) { return b.chat.bandwidth(); },
                               [](const Masked& m) { return m.inner->bandwidth(); }},
                    v_);
}

MatrixXd WeightSpec::apply_w(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("apply_w: dimension mismatch");
  return std::visit(Overloaded{[&](const Identity&) -> MatrixXd { return x; },
                               [&](const Banded& b) -> MatrixXd { return b.c.multiply_transpose(b.c.multiply(x)); },
                               [&](const BandedInverse& b) -> MatrixXd { return b.chat.solve(b.chat.solve_transpose(x)); },
                               [&](const Masked& m) -> MatrixXd {
                                 return mask_rows(m.mask, m.inner->apply_w(mask_rows(m.mask, x)));
                               }},
                    v_);
}

MatrixXd WeightSpec::apply_c(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("apply_c: dimension mismatch");
  return std::visit(Overloaded{[&](const Identity&) -> MatrixXd { return x; },
                               [&](const Banded& b) -> MatrixXd { return b.c.multiply(x); },
                               [&](const BandedInverse& b) -> MatrixXd { return b.chat.solve_transpose(x); },
                               [&](const Masked& m) -> MatrixXd { return m.inner->apply_c(mask_rows(m.mask, x)); }},
                    v_);
}

MatrixXd WeightSpec::solve_chat_t(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.rows() != n_) throw InvalidArgument("solve_chat_t: dimension mismatch");
  return std::visit(
      Overloaded{[&](const Identity&) -> MatrixXd { return x; },
                 [&](const BandedInverse& b) -> MatrixXd { return b.chat.solve_transpose(x); },
                 [&](const auto&) -> MatrixXd {
                   throw UnsupportedWeights("solve_chat_t requires identity or banded-inverse weights");
                 }},
      v_);
}

double WeightSpec::weighted_norm(const Eigen::Ref<const VectorXd>& x) const { return apply_c(x).norm(); }

std::optional<BandedUpper> WeightSpec::inverse_factor() const {
  return std::visit(Overloaded{[&](const Identity&) -> std::optional<BandedUpper> {
                                 return BandedUpper::diagonal(VectorXd::Ones(n_));
                               },
                               [&](const BandedInverse& b) -> std::optional<BandedUpper> { return b.chat; },
                               [&](const Banded& b) -> std::optional<BandedUpper> {
                                 if (b.c.bandwidth() > 0) return std::nullopt;
                                 VectorXd d(n_);
                                 for (Index i = 0; i < n_; ++i) d[i] = 1.0 / b.c(i, i);
                                 return BandedUpper::diagonal(d);
                               },
                               [&](const Masked&) -> std::optional<BandedUpper> { return std::nullopt; }},
                    v_);
}

Mask WeightSpec::mask() const {
  if (const auto* m = std::get_if<Masked>(&v_)) return m->mask;
  return Mask::Constant(n_, true);
}

const WeightSpec& WeightSpec::unmasked() const {
  if (const auto* m = std::get_if<Masked>(&v_)) return *m->inner;
  return *this;
}

MatrixXd WeightSpec::to_dense() const { return apply_w(MatrixXd::Identity(n_, n_)); }

bool ar_is_stationary(const VectorXd& phi) {
  // Step-down (Schur-Cohn) recursion: stationary iff every partial
  // autocorrelation has magnitude below one.
  VectorXd a = phi;
  for (Index m = a.size(); m >= 1; --m) {
    const double k = a[m - 1];
    if (!(std::abs(k) < 1.0)) return false;
    VectorXd prev(m - 1);
    for (Index j = 0; j < m - 1; ++j) prev[j] = (a[j] + k * a[m - 2 - j]) / (1.0 - k * k);
    a = prev;
  }
  return true;
}

VectorXd ar_autocovariance(const VectorXd& phi, double sigma2) {
  const Index p = phi.size();
  // gamma(k) - sum_j phi_j gamma(|k-j|) = sigma2 [k == 0], k = 0..p
  MatrixXd a = MatrixXd::Identity(p + 1, p + 1);
  for (Index k = 0; k <= p; ++k)
    for (Index j = 1; j <= p; ++j) a(k, std::abs(k - j)) -= phi[j - 1];
  VectorXd rhs = VectorXd::Zero(p + 1);
  rhs[0] = sigma2;
  return a.partialPivLu().solve(rhs);
}

WeightSpec ar_inverse_covariance(const VectorXd& phi, double sigma2, Index n) {
  const Index p = phi.size();
  if (!(sigma2 > 0.0)) throw InvalidArgument("ar_inverse_covariance: innovation variance must be positive");
  if (n <= p) throw InvalidArgument("ar_inverse_covariance: series length must exceed AR order");
  if (!ar_is_stationary(phi)) throw InvalidArgument("ar_inverse_covariance: AR coefficients are not stationary");

  SymBand w(n, p);
  if (p > 0) {
    // Exact density of the first p values.
    const VectorXd gamma = ar_autocovariance(phi, sigma2);
    MatrixXd head(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) head(i, j) = gamma[std::abs(i - j)];
    const MatrixXd head_inv = head.inverse();
    for (Index i = 0; i < p; ++i)
      for (Index j = i; j < p; ++j) w.upper(i, j) += head_inv(i, j);
  }
  // Prediction errors e_t = x_t - sum_j phi_j x_{t-j}, t >= p.
  VectorXd filter(p + 1);
  for (Index j = 0; j < p; ++j) filter[j] = -phi[p - 1 - j];
  filter[p] = 1.0;
  for (Index t = p; t < n; ++t) {
    const Index first = t - p;
    for (Index i = 0; i <= p; ++i)
      for (Index j = i; j <= p; ++j) w.upper(first + i, first + j) += filter[i] * filter[j] / sigma2;
  }
  return WeightSpec::from_banded_w(w);
}

WeightSpec ma_covariance_weights(const VectorXd& theta, double sigma2, Index n) {
  const Index q = theta.size();
  if (!(sigma2 > 0.0)) throw InvalidArgument("ma_covariance_weights: innovation variance must be positive");
  if (n <= q) throw InvalidArgument("ma_covariance_weights: series length must exceed MA order");
  VectorXd psi(q + 1);
  psi[0] = 1.0;
  psi.tail(q) = theta;
  SymBand sigma(n, q);
  for (Index k = 0; k <= q; ++k) {
    const double g = sigma2 * psi.head(q + 1 - k).dot(psi.tail(q + 1 - k));
    for (Index i = 0; i + k < n; ++i) sigma.upper(i, i + k) = g;
  }
  return WeightSpec::from_banded_w_inverse(sigma);
}

WeightSpec mask_missing(const WeightSpec& w0, const Mask& mask) {
  if (mask.size() != w0.size()) throw InvalidArgument("mask_missing: mask length differs from weight dimension");
  const WeightSpec& base = w0.unmasked();
  const Mask combined = mask && w0.mask();
  if (combined.all()) return base;
  return WeightSpec(w0.size(), WeightSpec::Masked{std::make_shared<const WeightSpec>(base), combined});
}

}  // namespace hmgn
