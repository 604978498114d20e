#include "hmgn/datasets.hpp"

#include <Eigen/QR>

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace hmgn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const char* what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw InvalidArgument(std::string("cannot parse ") + what + " '" + text + "'");
  return v;
}

Index parse_index(const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw InvalidArgument("cannot parse index '" + text + "'");
  return static_cast<Index>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

VectorXd equispaced_grid(Index n) {
  VectorXd t(n);
  for (Index i = 0; i < n; ++i) t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

}  // namespace

MatrixXd legendre_basis(Index n, Index degree) {
  if (n <= degree) throw InvalidArgument("legendre_basis: need more points than the degree");
  const VectorXd t = equispaced_grid(n);
  MatrixXd p(n, degree + 1);
  p.col(0).setOnes();
  if (degree >= 1) p.col(1) = t;
  for (Index k = 1; k < degree; ++k) {
    const double kk = static_cast<double>(k);
    p.col(k + 1) = ((2.0 * kk + 1.0) * t.cwiseProduct(p.col(k)) - kk * p.col(k - 1)) / (kk + 1.0);
  }
  Eigen::HouseholderQR<MatrixXd> qr(p);
  return qr.householderQ() * MatrixXd::Identity(n, degree + 1);
}

KnownMinimumProblem build_known_minimum(Index n) {
  if (n < 13) throw InvalidArgument("build_known_minimum: N must be at least 13");
  const VectorXd t = equispaced_grid(n);
  VectorXd y = t.array().square();
  y /= y.norm();
  VectorXd noise = t.cwiseAbs();
  noise /= noise.norm();

  KnownMinimumProblem prob{TimeSeries(y), TimeSeries(y), GlrrVector{1.0, -3.0, 3.0, -1.0}, legendre_basis(n, 5)};
  const MatrixXd& q = prob.tangent_basis;
  prob.x = TimeSeries(VectorXd(y + noise - q * (q.transpose() * noise)));
  return prob;
}

VectorXd ishteva50_signal() {
  constexpr double pi = std::numbers::pi;
  VectorXd s(50);
  for (Index i = 1; i <= 50; ++i) {
    const double d = static_cast<double>(i);
    s[i - 1] = std::pow(0.9, d) * std::cos(pi * d / 5.0) + 0.2 * std::pow(1.05, d) * std::cos(pi * d / 12.0 + pi / 4.0);
  }
  return s;
}

VectorXd add_relative_noise(const VectorXd& s, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) throw InvalidArgument("add_relative_noise: level must be non-negative");
  if (level == 0.0) return s;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  VectorXd e(s.size());
  for (Index i = 0; i < e.size(); ++i) e[i] = dist(gen);
  return s + level * s.norm() * e / e.norm();
}

std::vector<std::pair<Index, Index>> parse_ranges(const std::string& text) {
  std::vector<std::pair<Index, Index>> out;
  for (const auto& raw : split(text, ',')) {
    const std::string item = trim(raw);
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    Index lo, hi;
    if (dash == std::string::npos) {
      lo = hi = parse_index(item);
    } else {
      lo = parse_index(item.substr(0, dash));
      hi = parse_index(item.substr(dash + 1));
    }
    if (lo < 1 || hi < lo) throw InvalidArgument("invalid range '" + item + "'");
    out.emplace_back(lo, hi);
  }
  return out;
}

TimeSeries apply_gaps(const VectorXd& values, const std::vector<std::pair<Index, Index>>& ranges) {
  Mask mask = Mask::Constant(values.size(), true);
  for (const auto& [lo, hi] : ranges) {
    if (hi > values.size()) throw InvalidArgument("gap range exceeds series length");
    for (Index i = lo; i <= hi; ++i) mask[i - 1] = false;
  }
  return TimeSeries(values, mask);
}

std::vector<SignalComponent> parse_components(const std::string& text) {
  std::vector<SignalComponent> out;
  for (const auto& raw : split(text, ';')) {
    const std::string comp = trim(raw);
    if (comp.empty()) continue;
    SignalComponent c;
    c.poly = VectorXd::Ones(1);
    for (const auto& field : split(comp, ':')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw InvalidArgument("component field without '=': '" + field + "'");
      const std::string key = trim(field.substr(0, eq));
      const std::string value = field.substr(eq + 1);
      if (key == "p") {
        const auto parts = split(value, ',');
        c.poly.resize(static_cast<Index>(parts.size()));
        for (std::size_t k = 0; k < parts.size(); ++k)
          c.poly[static_cast<Index>(k)] = parse_double(parts[k], "polynomial coefficient");
      } else if (key == "a") {
        c.alpha = parse_double(value, "alpha");
      } else if (key == "w") {
        c.omega = parse_double(value, "omega");
      } else if (key == "phi") {
        c.phi = parse_double(value, "phase");
      } else {
        throw InvalidArgument("unknown component key '" + key + "'");
      }
    }
    out.push_back(std::move(c));
  }
  if (out.empty()) throw InvalidArgument("no signal components given");
  return out;
}

}  // namespace hmgn
