#pragma once

// Gauss-Newton solvers for min ||x - s||_W over series s of rank at most r.
//
// Every iterate is a GLRR a = H_tau(adot); the signal estimate for it is the
// weighted projection of x onto Z(a). The four methods differ in how that
// projection and the step direction are computed:
//
//   Mgn    image-space step from the particular solution F of Q(a)'F = M,
//          projections through a plain Fourier basis of Z(a)
//   SMgn   as Mgn with compensated polynomial evaluation in the basis
//   Vpgn   variable projection with the kernel (Gamma) projection and its
//          Jacobian; needs a banded W^{-1}
//   SVpgn  as Vpgn but signals are projected through the compensated basis

#include <optional>
#include <string>
#include <vector>

#include "hmgn/projection.hpp"

namespace hmgn {

enum class Method { Mgn, SMgn, Vpgn, SVpgn };
enum class Termination { StepZero, MaxIter, SmallStepStop };

std::string to_string(Method m);
std::string to_string(Termination t);
/// Accepts "mgn", "s-mgn", "vpgn", "s-vpgn" (case-insensitive).
Method parse_method(const std::string& name);

struct SolverConfig {
  Method method = Method::SMgn;
  int max_iter = 200;
  /// Backtracking tries gamma = 1, 1/2, ..., 2^-gamma_min_exponent.
  int gamma_min_exponent = 16;
  /// Relative change of the signal below which a step counts as small.
  double zeta = 5e-8;
  /// Re-select the pivot from the current coefficients before every step.
  bool retau_each_iter = true;
  /// In the small-step regime a full step must also not increase the
  /// objective, so the trace is monotone. When cleared, the full step is
  /// taken on the step-norm comparison alone and the objective may rise at
  /// roundoff level, in exchange for a few more iterations near the minimum.
  bool strict_descent = true;
  /// Keep S_k for every iterate in the trace.
  bool record_signals = false;
};

struct IterationRecord {
  Index tau = 0;  // zero-based pivot
  VectorXd adot;
  /// ||x - S_k||_W
  double residual = 0.0;
  /// Step size taken from this iterate; 0 for the last one.
  double gamma = 0.0;
  /// ||Q(a)' S_k|| / ||a||
  double glrr_relative_residual = 0.0;
  VectorXd signal;  // filled when SolverConfig::record_signals is set
};

struct SolverTrace {
  std::vector<IterationRecord> iterations;
  Termination termination = Termination::MaxIter;

  /// Number of accepted steps.
  Index steps() const { return iterations.empty() ? 0 : static_cast<Index>(iterations.size()) - 1; }
  /// Largest increase of the objective between consecutive iterates (<= 0 when monotone).
  double max_increase() const;
};

struct FitResult {
  VectorXd signal;
  GlrrVector glrr;
  SolverTrace trace;
};

/// Signal estimate S*(a) = Pi_{Z(a),W} x as computed by the given method.
VectorXd project_signal(Method method, const GlrrVector& a, const WeightSpec& w, const VectorXd& x);

struct StepResult {
  VectorXd direction;  // in R^r, coordinates K(tau)
  VectorXd signal;     // S_k
  double residual = 0.0;
};

/// Modified Gauss-Newton direction at H_tau(adot).
StepResult mgn_step(const VectorXd& adot, Index tau, const VectorXd& x, const WeightSpec& w, HornerMode mode);

/// Variable-projection Gauss-Newton direction at H_tau(adot). With
/// `basis_projection` the signal comes from the compensated basis, otherwise
/// from the Gamma factorization.
StepResult vpgn_step(const VectorXd& adot, Index tau, const VectorXd& x, const WeightSpec& w,
                     bool basis_projection);

StepResult solver_step(Method method, const VectorXd& adot, Index tau, const VectorXd& x, const WeightSpec& w);

struct LineSearchResult {
  double gamma = 0.0;
  VectorXd adot_next;
  VectorXd signal_next;
  double residual_next = 0.0;
  bool small_step = false;
};

/// Backtracking along `direction` from adot, whose signal has objective
/// `residual` and value `signal`. `prev_step_norm` is ||adot_k - adot_{k-1}||,
/// ignored when `first` is set.
LineSearchResult line_search(const VectorXd& adot, const VectorXd& direction, Index tau, const VectorXd& x,
                             const WeightSpec& w, const VectorXd& signal, double residual, double prev_step_norm,
                             bool first, const SolverConfig& config);

/// Trailing left singular vector of T_{r+1}(x) with missing values replaced
/// by the observed mean.
GlrrVector initial_glrr(const TimeSeries& x, Index r);

/// Runs the selected method from a0 (default initial_glrr). Missing values
/// of x must already be reflected in w (see mask_missing).
FitResult fit(const TimeSeries& x, Index r, const WeightSpec& w, const SolverConfig& config,
              const std::optional<GlrrVector>& a0 = std::nullopt);

/// ||Q(a)' s|| / ||a||
double glrr_relative_residual(const GlrrVector& a, const VectorXd& s);

/// ||Pi_{Z(a^2),W}(x - s)|| / ||x - s||: zero at a stationary point s of the
/// objective whose GLRR is a.
double stationarity_measure(const GlrrVector& a, const WeightSpec& w, const VectorXd& x, const VectorXd& s);

}  // namespace hmgn
