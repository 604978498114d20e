#include "hmgn/series.hpp"

#include <cmath>
#include <numbers>

namespace hmgn {

TimeSeries::TimeSeries(VectorXd values) : values_(std::move(values)), mask_(Mask::Constant(values_.size(), true)) {
  if (values_.size() < 1) throw InvalidArgument("TimeSeries: empty series");
}

TimeSeries::TimeSeries(VectorXd values, Mask mask) : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.size() < 1) throw InvalidArgument("TimeSeries: empty series");
  if (mask_.size() != values_.size()) throw InvalidArgument("TimeSeries: mask length differs from series length");
  for (Index i = 0; i < values_.size(); ++i)
    if (!mask_[i]) values_[i] = 0.0;
}

TimeSeries TimeSeries::from_nan_coded(const VectorXd& raw) {
  Mask mask(raw.size());
  for (Index i = 0; i < raw.size(); ++i) mask[i] = !std::isnan(raw[i]);
  return TimeSeries(raw, mask);
}

VectorXd TimeSeries::nan_coded() const {
  VectorXd out = values_;
  for (Index i = 0; i < out.size(); ++i)
    if (!mask_[i]) out[i] = std::numeric_limits<double>::quiet_NaN();
  return out;
}

GlrrVector::GlrrVector(VectorXd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 1) throw InvalidArgument("GlrrVector: empty coefficient vector");
  if (!coeffs_.allFinite()) throw InvalidArgument("GlrrVector: non-finite coefficient");
  if (coeffs_.isZero(0.0)) throw InvalidArgument("GlrrVector: zero coefficient vector");
}

GlrrVector::GlrrVector(std::initializer_list<double> coeffs)
    : GlrrVector(Eigen::Map<const VectorXd>(coeffs.begin(), static_cast<Index>(coeffs.size()))) {}

NormalizedGlrr normalize_glrr(const GlrrVector& a) {
  const VectorXd& c = a.coeffs();
  Index pivot = 0;
  for (Index i = 1; i < c.size(); ++i)
    if (std::abs(c[i]) > std::abs(c[pivot])) pivot = i;
  const double scale = -1.0 / c[pivot];
  NormalizedGlrr out;
  out.pivot = pivot;
  out.adot.resize(c.size() - 1);
  for (Index i = 0, k = 0; i < c.size(); ++i)
    if (i != pivot) out.adot[k++] = scale * c[i];
  return out;
}

GlrrVector h_tau(const VectorXd& adot, Index pivot) {
  const Index r = adot.size();
  if (pivot < 0 || pivot > r) throw InvalidArgument("h_tau: pivot index out of range");
  VectorXd a(r + 1);
  a.head(pivot) = adot.head(pivot);
  a[pivot] = -1.0;
  a.tail(r - pivot) = adot.tail(r - pivot);
  return GlrrVector(std::move(a));
}

std::vector<Index> free_positions(Index order, Index pivot) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(order));
  for (Index i = 0; i <= order; ++i)
    if (i != pivot) out.push_back(i);
  return out;
}

namespace {

void validate_components(std::span<const SignalComponent> components) {
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    if (c.poly.size() < 1) throw InvalidArgument("signal component without polynomial coefficients");
    if (!(c.omega >= 0.0 && c.omega <= 0.5)) throw InvalidArgument("signal frequency outside [0, 0.5]");
    for (std::size_t l = 0; l < k; ++l)
      if (components[l].alpha == c.alpha && components[l].omega == c.omega)
        throw InvalidArgument("duplicate (alpha, omega) pair in signal components");
  }
}

}  // namespace

TimeSeries generate_model_signal(std::span<const SignalComponent> components, Index length) {
  if (length < 1) throw InvalidArgument("generate_model_signal: length must be positive");
  validate_components(components);
  VectorXd s = VectorXd::Zero(length);
  for (const auto& c : components) {
    for (Index i = 0; i < length; ++i) {
      const double n = static_cast<double>(i + 1);
      double p = 0.0;
      for (Index d = c.poly.size() - 1; d >= 0; --d) p = p * n + c.poly[d];
      s[i] += p * std::exp(c.alpha * n) * std::sin(2.0 * std::numbers::pi * c.omega * n + c.phi);
    }
  }
  return TimeSeries(std::move(s));
}

Index model_rank(std::span<const SignalComponent> components) {
  validate_components(components);
  Index rank = 0;
  for (const auto& c : components) {
    const bool edge = c.omega == 0.0 || c.omega == 0.5;
    // sin(2 pi omega n + phi) vanishes identically at the edge frequencies when sin(phi) = 0.
    if (edge && std::abs(std::sin(c.phi)) < 1e-12)
      throw InvalidArgument("model_rank: phase must be nonzero when omega is 0 or 0.5");
    if (c.poly[c.poly.size() - 1] == 0.0) throw InvalidArgument("model_rank: leading polynomial coefficient is zero");
    rank += c.poly.size() * (edge ? 1 : 2);
  }
  return rank;
}

}  // namespace hmgn
