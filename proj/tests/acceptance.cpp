// Acceptance report: one PASS/FAIL line per criterion. Exits nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hmgn/datasets.hpp"
#include "hmgn/solvers.hpp"
#include "test_support.hpp"

using namespace hmgn;
using hmgn::testing::random_vector;
using hmgn::testing::uniform;
using hmgn::testing::uniform_index;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Largest objective increase over every fit run by the report.
double g_max_increase = -std::numeric_limits<double>::infinity();
int g_fits = 0;

FitResult tracked_fit(const TimeSeries& x, Index r, const WeightSpec& w, const SolverConfig& config,
                      const std::optional<GlrrVector>& a0) {
  FitResult f = fit(x, r, w, config, a0);
  g_max_increase = std::max(g_max_increase, f.trace.max_increase());
  ++g_fits;
  return f;
}

WeightSpec ma1(double theta, Index n) {
  VectorXd t(1);
  t << theta;
  return ma_covariance_weights(t, 1.0, n);
}

WeightSpec ar1(double phi, Index n) {
  VectorXd p(1);
  p << phi;
  return ar_inverse_covariance(p, 1.0, n);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Verdict nullspace_correctness() {
  std::mt19937_64 gen(101);
  const auto t0 = Clock::now();
  double worst_res = 0.0, worst_orth = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Index r = uniform_index(gen, 1, 6);
    const Index n = uniform_index(gen, 2 * r + 1, 512);
    const GlrrVector a(random_vector(gen, r + 1));
    for (auto mode : {HornerMode::Plain, HornerMode::Compensated}) {
      const MatrixXd z = nullspace_basis(a, n, mode).Z;
      worst_res = std::max(worst_res, (build_q_matrix(a.coeffs(), n).transpose() * z).norm());
      worst_orth = std::max(worst_orth, (z.transpose() * z - MatrixXd::Identity(r, r)).norm());
    }
  }
  const double secs = seconds_since(t0);
  return {worst_res <= 1e-9 && worst_orth <= 1e-10 && secs < 30.0,
          "max ||Q'Z||_F = " + fmt(worst_res) + ", max ||Z'Z - I||_F = " + fmt(worst_orth) + ", " + fmt(secs) + " s"};
}

Verdict projection_cross_oracle() {
  std::mt19937_64 gen(102);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index r = uniform_index(gen, 1, 5);
    const Index n = uniform_index(gen, 2 * r + 2, 500);
    const GlrrVector a = hmgn::testing::well_conditioned_glrr(gen, r);
    const WeightSpec w = ma1(uniform(gen, -0.7, 0.7), n);
    const VectorXd x = random_vector(gen, n);
    const VectorXd basis = project_onto_glrr_space(a, w, x, HornerMode::Compensated).projected;
    worst = std::max(worst, (basis - project_gamma(a, w, x)).norm() / x.norm());
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 60.0, "max relative difference " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Verdict step_equivalence() {
  std::mt19937_64 gen(103);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index r = 1 + t % 2;
    const Index n = uniform_index(gen, 4 * r + 4, 60);
    const GlrrVector a = hmgn::testing::mild_glrr(gen, r);
    const VectorXd clean = nullspace_basis(a, n, HornerMode::Compensated).Z * random_vector(gen, r);
    const VectorXd x = clean + 0.05 * clean.norm() / std::sqrt(double(n)) * random_vector(gen, n);
    const WeightSpec w = t % 3 == 0 ? ar1(0.5, n) : WeightSpec::identity(n);
    const NormalizedGlrr start =
        normalize_glrr(GlrrVector(VectorXd(a.coeffs() + 0.01 * random_vector(gen, r + 1))));
    const StepResult s = mgn_step(start.adot, start.pivot, x, w, HornerMode::Plain);
    const VectorXd oracle = hmgn::testing::brute_force_direction(start.adot, start.pivot, x, w, s.signal);
    worst = std::max(worst, (s.direction - oracle).norm() / oracle.norm());
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 60.0, "max relative difference " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Verdict tangent_space() {
  std::mt19937_64 gen(104);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index r = 1 + t % 2;
    const Index n = uniform_index(gen, 4 * r + 4, 60);
    const GlrrVector a = hmgn::testing::mild_glrr(gen, r);
    const NormalizedGlrr na = normalize_glrr(a);
    const Index p = na.pivot;
    const VectorXd s = nullspace_basis(a, n, HornerMode::Compensated).Z * random_vector(gen, r);
    const auto idx = hmgn::testing::signal_coordinates(n, r, p);
    VectorXd theta(2 * r);
    for (Index i = 0; i < r; ++i) theta[i] = s[idx[static_cast<std::size_t>(i)]];
    theta.tail(r) = na.adot;
    const GlrrVector a2 = acyclic_self_convolution(h_tau(na.adot, p));
    for (Index k = 0; k < 2 * r; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(theta[k]));
      VectorXd tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      const VectorXd v = (hmgn::testing::explicit_signal(tp.head(r), tp.tail(r), p, n) -
                          hmgn::testing::explicit_signal(tm.head(r), tm.tail(r), p, n)) /
                         (2.0 * h);
      worst = std::max(worst, glrr_residual(a2.coeffs(), v).norm() / v.norm());
    }
  }
  return {worst <= 1e-5, "max ||Q(a^2)'v|| / ||v|| = " + fmt(worst)};
}

struct KnownMinimumRun {
  Index n = 0;
  KnownMinimumProblem problem;
  FitResult smgn, mgn;
  std::optional<FitResult> vpgn;
};

std::vector<KnownMinimumRun> g_known_minimum;

Verdict known_minimum_convergence() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (Index n : {20, 100, 1000}) {
    KnownMinimumRun run;
    run.n = n;
    run.problem = build_known_minimum(n);
    const WeightSpec w = WeightSpec::identity(n);
    const GlrrVector a0(VectorXd(run.problem.a_star.coeffs().array() + 1e-6));
    SolverConfig cfg;
    cfg.method = Method::SMgn;
    run.smgn = tracked_fit(run.problem.x, 3, w, cfg, a0);
    cfg.method = Method::Mgn;
    run.mgn = tracked_fit(run.problem.x, 3, w, cfg, a0);
    cfg.method = Method::Vpgn;
    run.vpgn = tracked_fit(run.problem.x, 3, w, cfg, a0);
    const VectorXd& y = run.problem.y_star.values();
    const double d_s = (run.smgn.signal - y).norm();
    const double rel = glrr_relative_residual(run.smgn.glrr, run.smgn.signal);
    ok = ok && d_s <= 1e-6 && rel <= 1e-8;
    detail << "N=" << n << ": S-MGN dist " << fmt(d_s) << " rel " << fmt(rel);
    if (n == 1000) {
      const double d_m = (run.mgn.signal - y).norm();
      const double d_v = (run.vpgn->signal - y).norm();
      ok = ok && d_m < d_v && d_s < d_v;
      detail << ", MGN dist " << fmt(d_m) << ", VPGN dist " << fmt(d_v);
    }
    detail << "; ";
    g_known_minimum.push_back(std::move(run));
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 300.0;
  detail << fmt(secs) << " s";
  return {ok, detail.str()};
}

Verdict stationarity_certificate() {
  bool ok = !g_known_minimum.empty();
  std::ostringstream detail;
  for (const KnownMinimumRun& run : g_known_minimum) {
    const WeightSpec w = WeightSpec::identity(run.n);
    const VectorXd& x = run.problem.x.values();
    const double fitted = stationarity_measure(run.smgn.glrr, w, x, run.smgn.signal);
    const double exact = stationarity_measure(run.problem.a_star, w, x, run.smgn.signal);
    ok = ok && fitted <= 1e-5;
    detail << "N=" << run.n << ": " << fmt(fitted) << " (with exact a*: " << fmt(exact) << "); ";
  }
  return {ok, detail.str()};
}

Verdict conditioning_slopes() {
  const std::vector<GlrrVector> polys{GlrrVector{1.0, -1.0}, GlrrVector{1.0, -2.0, 1.0},
                                      GlrrVector{1.0, -3.0, 3.0, -1.0}};
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t t = 0; t < polys.size(); ++t) {
    std::vector<double> ln, lm;
    for (Index n = 64; n <= 4096; n *= 2) {
      ln.push_back(std::log(double(n)));
      lm.push_back(std::log(rotated_spectrum(polys[t], n, HornerMode::Compensated).min_abs()));
    }
    const double k = double(ln.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ln.size(); ++i) {
      sx += ln[i];
      sy += lm[i];
      sxx += ln[i] * ln[i];
      sxy += ln[i] * lm[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    ok = ok && std::abs(slope + double(t + 1)) <= 0.25;
    detail << "t=" << t + 1 << ": " << fmt(slope) << "; ";
  }
  return {ok, detail.str()};
}

Verdict compensated_gain() {
  const Index n = 5000;
  const KnownMinimumProblem km = build_known_minimum(n);
  const WeightSpec w = WeightSpec::identity(n);
  const GlrrVector a0(VectorXd(km.a_star.coeffs().array() + 1e-6));
  SolverConfig cfg;
  cfg.method = Method::SMgn;
  const FitResult s = tracked_fit(km.x, 3, w, cfg, a0);
  cfg.method = Method::Mgn;
  const FitResult m = tracked_fit(km.x, 3, w, cfg, a0);
  const double rs = glrr_relative_residual(s.glrr, s.signal);
  const double rm = glrr_relative_residual(m.glrr, m.signal);
  return {rm >= 1e2 * rs, "S-MGN " + fmt(rs) + ", MGN " + fmt(rm) + ", ratio " + fmt(rm / rs) + "; distances S-MGN " +
                              fmt((s.signal - km.y_star.values()).norm()) + ", MGN " +
                              fmt((m.signal - km.y_star.values()).norm())};
}

Verdict complexity_scaling() {
  auto step_time = [](Index n) {
    const KnownMinimumProblem km = build_known_minimum(n);
    const WeightSpec w = ar1(0.5, n);
    const NormalizedGlrr a = normalize_glrr(GlrrVector(VectorXd(km.a_star.coeffs().array() + 1e-3)));
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 7; ++rep) {
      const auto t0 = Clock::now();
      const StepResult s = mgn_step(a.adot, a.pivot, km.x.values(), w, HornerMode::Plain);
      best = std::min(best, seconds_since(t0));
      if (!s.direction.allFinite()) return std::numeric_limits<double>::infinity();
    }
    return best;
  };
  const double t1 = step_time(1000);
  const double t8 = step_time(8000);
  return {t8 / t1 <= 12.0,
          "time(8000)/time(1000) = " + fmt(t8 / t1) + " (" + fmt(t1 * 1e3) + " ms, " + fmt(t8 * 1e3) + " ms)"};
}

Verdict missing_data_fit() {
  const VectorXd s50 = ishteva50_signal();
  const TimeSeries x = apply_gaps(add_relative_noise(s50, 0.2, 1), {{10, 19}, {35, 39}});
  const WeightSpec w = mask_missing(WeightSpec::identity(x.size()), x.mask());
  SolverConfig cfg;
  cfg.method = Method::SMgn;
  const FitResult f = tracked_fit(x, 4, w, cfg, std::nullopt);
  const double inc = f.trace.max_increase();
  const double glrr = glrr_relative_residual(f.glrr, f.signal) / f.signal.norm();
  const double err = (f.signal - s50).norm() / s50.norm();
  return {inc <= 0.0 && glrr <= 1e-8 && err < 0.2,
          to_string(f.trace.termination) + " after " + std::to_string(f.trace.steps()) + " steps, max increase " +
              fmt(inc) + ", GLRR residual " + fmt(glrr) + ", relative error " + fmt(err)};
}

Verdict monotonicity() {
  return {g_fits > 0 && g_max_increase <= 0.0,
          std::to_string(g_fits) + " fits, largest objective increase " + fmt(g_max_increase)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "nullspace correctness", nullspace_correctness},
      {2, "projection cross-oracle", projection_cross_oracle},
      {3, "MGN step equivalence", step_equivalence},
      {4, "tangent space", tangent_space},
      {5, "known-minimum convergence", known_minimum_convergence},
      {6, "stationarity certificate", stationarity_certificate},
      {7, "conditioning slopes", conditioning_slopes},
      {8, "compensated Horner gain", compensated_gain},
      {9, "complexity scaling", complexity_scaling},
      {10, "missing-data fit", missing_data_fit},
      {11, "monotonicity", monotonicity},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("C%-2d %s  %s: %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
