#include "hmgn/solvers.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace hmgn {

namespace {

GlrrProjector make_projector(const GlrrVector& a, const WeightSpec& w, HornerMode mode) {
  try {
    return GlrrProjector(a, w, mode);
  } catch (const SpectrumDegenerate&) {
    // The rotation search is grid specific; a shifted candidate lattice
    // usually finds a usable angle when the first one did not.
    return GlrrProjector(a, w, mode, 0.5);
  }
}

HornerMode basis_mode(Method m) {
  return (m == Method::Mgn) ? HornerMode::Plain : HornerMode::Compensated;
}

struct Evaluated {
  VectorXd signal;
  double residual = std::numeric_limits<double>::infinity();
};

Evaluated evaluate(Method method, const VectorXd& adot, Index tau, const VectorXd& x, const WeightSpec& w) {
  Evaluated e;
  try {
    e.signal = project_signal(method, h_tau(adot, tau), w, x);
    e.residual = w.weighted_norm(x - e.signal);
    if (!std::isfinite(e.residual)) e.residual = std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    e.residual = std::numeric_limits<double>::infinity();
  }
  return e;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Mgn: return "mgn";
    case Method::SMgn: return "s-mgn";
    case Method::Vpgn: return "vpgn";
    case Method::SVpgn: return "s-vpgn";
  }
  return "unknown";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::StepZero: return "step_zero";
    case Termination::MaxIter: return "max_iter";
    case Termination::SmallStepStop: return "small_step_stop";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "mgn") return Method::Mgn;
  if (s == "s-mgn" || s == "smgn") return Method::SMgn;
  if (s == "vpgn") return Method::Vpgn;
  if (s == "s-vpgn" || s == "svpgn") return Method::SVpgn;
  throw InvalidArgument("unknown method '" + name + "'");
}

double SolverTrace::max_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < iterations.size(); ++k)
    worst = std::max(worst, iterations[k].residual - iterations[k - 1].residual);
  return iterations.size() < 2 ? 0.0 : worst;
}

double glrr_relative_residual(const GlrrVector& a, const VectorXd& s) {
  return glrr_residual(a.coeffs(), s).norm() / a.coeffs().norm();
}

double stationarity_measure(const GlrrVector& a, const WeightSpec& w, const VectorXd& x, const VectorXd& s) {
  const VectorXd d = x - s;
  const double dn = d.norm();
  if (dn == 0.0) return 0.0;
  const GlrrVector a2 = acyclic_self_convolution(a);
  return project_onto_glrr_space(a2, w, d, HornerMode::Compensated).projected.norm() / dn;
}

VectorXd project_signal(Method method, const GlrrVector& a, const WeightSpec& w, const VectorXd& x) {
  if (method == Method::Vpgn) return GammaFactor(a, w).project(x);
  return make_projector(a, w, basis_mode(method)).project(x).projected;
}

StepResult mgn_step(const VectorXd& adot, Index tau, const VectorXd& x, const WeightSpec& w, HornerMode mode) {
  const GlrrVector a = h_tau(adot, tau);
  const GlrrProjector proj = make_projector(a, w, mode);
  StepResult out;
  out.signal = proj.project(x).projected;
  out.residual = w.weighted_norm(x - out.signal);
  const MatrixXd fhat = fhat_matrix(proj.spectrum(), out.signal, tau);
  const MatrixXd design = fhat - proj.project_columns(fhat);
  out.direction = WeightedLeastSquares(design, w).coefficients(x - out.signal);
  return out;
}

StepResult vpgn_step(const VectorXd& adot, Index tau, const VectorXd& x, const WeightSpec& w,
                     bool basis_projection) {
  const GlrrVector a = h_tau(adot, tau);
  const GammaFactor gamma(a, w);
  StepResult out;
  out.signal = basis_projection ? make_projector(a, w, HornerMode::Compensated).project(x).projected
                                : gamma.project(x);
  out.residual = w.weighted_norm(x - out.signal);
  const MatrixXd jac = vp_jacobian(gamma, tau, x);
  out.direction = WeightedLeastSquares(jac, w).coefficients(x - out.signal);
  return out;
}

StepResult solver_step(Method method, const VectorXd& adot, Index tau, const VectorXd& x, const WeightSpec& w) {
  switch (method) {
    case Method::Mgn: return mgn_step(adot, tau, x, w, HornerMode::Plain);
    case Method::SMgn: return mgn_step(adot, tau, x, w, HornerMode::Compensated);
    case Method::Vpgn: return vpgn_step(adot, tau, x, w, false);
    case Method::SVpgn: return vpgn_step(adot, tau, x, w, true);
  }
  throw InvalidArgument("solver_step: unknown method");
}

LineSearchResult line_search(const VectorXd& adot, const VectorXd& direction, Index tau, const VectorXd& x,
                             const WeightSpec& w, const VectorXd& signal, double residual, double prev_step_norm,
                             bool first, const SolverConfig& config) {
  LineSearchResult out;
  out.adot_next = adot;
  out.signal_next = signal;
  out.residual_next = residual;
  if (!direction.allFinite()) return out;

  const Evaluated full = evaluate(config.method, adot + direction, tau, x, w);
  const double signal_norm = signal.norm();
  if (std::isfinite(full.residual) && (full.signal - signal).norm() < config.zeta * signal_norm) {
    out.small_step = true;
    const bool allowed = !config.strict_descent || full.residual <= residual;
    if ((first || direction.norm() < prev_step_norm) && allowed) {
      out.gamma = 1.0;
      out.adot_next = adot + direction;
      out.signal_next = full.signal;
      out.residual_next = full.residual;
    }
    return out;
  }

  double gamma = 1.0;
  for (int m = 0; m <= config.gamma_min_exponent; ++m, gamma *= 0.5) {
    const VectorXd trial = adot + gamma * direction;
    const Evaluated e = m == 0 ? full : evaluate(config.method, trial, tau, x, w);
    if (e.residual <= residual) {
      out.gamma = gamma;
      out.adot_next = trial;
      out.signal_next = e.signal;
      out.residual_next = e.residual;
      return out;
    }
  }
  return out;
}

GlrrVector initial_glrr(const TimeSeries& x, Index r) {
  const Index n = x.size();
  if (r < 1) throw InvalidArgument("initial_glrr: rank must be positive");
  if (n < 2 * r + 2) throw InvalidArgument("initial_glrr: series too short for the requested rank");
  if (x.observed_count() == 0) throw InvalidArgument("initial_glrr: no observed values");
  VectorXd filled = x.values();
  if (!x.fully_observed()) {
    double mean = 0.0;
    for (Index i = 0; i < n; ++i)
      if (x.mask()[i]) mean += filled[i];
    mean /= static_cast<double>(x.observed_count());
    for (Index i = 0; i < n; ++i)
      if (!x.mask()[i]) filled[i] = mean;
  }
  const MatrixXd t = embed(filled, r + 1);
  Eigen::JacobiSVD<MatrixXd> svd(t.transpose(), Eigen::ComputeThinV);
  return GlrrVector(VectorXd(svd.matrixV().col(r)));
}

FitResult fit(const TimeSeries& x, Index r, const WeightSpec& w0, const SolverConfig& config,
              const std::optional<GlrrVector>& a0) {
  const Index n = x.size();
  if (w0.size() != n) throw InvalidArgument("fit: weight dimension differs from series length");
  if (r < 1 || 2 * r >= n) throw InvalidArgument("fit: rank must satisfy 1 <= r < N/2");
  if (config.max_iter < 1) throw InvalidArgument("fit: max_iter must be positive");
  if (!(config.zeta > 0.0)) throw InvalidArgument("fit: zeta must be positive");
  const WeightSpec w = mask_missing(w0, x.mask());
  const VectorXd& values = x.values();

  GlrrVector a = a0 ? *a0 : initial_glrr(x, r);
  if (a.order() != r) throw InvalidArgument("fit: initial GLRR has the wrong order");
  NormalizedGlrr cur = normalize_glrr(a);

  FitResult result;
  SolverTrace& trace = result.trace;
  trace.termination = Termination::MaxIter;
  double prev_step_norm = std::numeric_limits<double>::infinity();
  VectorXd signal;
  std::optional<Evaluated> carried;

  for (int k = 0;; ++k) {
    if (config.retau_each_iter && k > 0) cur = normalize_glrr(h_tau(cur));
    StepResult step;
    const bool last = k == config.max_iter;
    if (last) {
      step.signal = project_signal(config.method, h_tau(cur), w, values);
      step.residual = w.weighted_norm(values - step.signal);
    } else {
      step = solver_step(config.method, cur.adot, cur.pivot, values, w);
    }
    // The objective at an accepted point is the value the line search
    // compared against; recomputing it after re-normalization would only
    // add rounding noise to the trace.
    if (carried) {
      step.signal = carried->signal;
      step.residual = carried->residual;
    }
    signal = step.signal;

    IterationRecord rec;
    rec.tau = cur.pivot;
    rec.adot = cur.adot;
    rec.residual = step.residual;
    rec.glrr_relative_residual = glrr_relative_residual(h_tau(cur), signal);
    if (config.record_signals) rec.signal = signal;
    if (last) {
      trace.iterations.push_back(std::move(rec));
      break;
    }

    const LineSearchResult ls = line_search(cur.adot, step.direction, cur.pivot, values, w, signal, step.residual,
                                            prev_step_norm, k == 0, config);
    rec.gamma = ls.gamma;
    trace.iterations.push_back(std::move(rec));
    if (ls.gamma == 0.0) {
      trace.termination = ls.small_step ? Termination::SmallStepStop : Termination::StepZero;
      break;
    }
    prev_step_norm = (ls.adot_next - cur.adot).norm();
    cur.adot = ls.adot_next;
    carried = Evaluated{ls.signal_next, ls.residual_next};
  }

  result.signal = signal;
  result.glrr = h_tau(cur);
  return result;
}

}  // namespace hmgn
