#include "hmgn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "hmgn/csv_io.hpp"
#include "hmgn/datasets.hpp"

namespace hmgn {

namespace {

constexpr Index kDefaultMaxLength = 10000;

struct Cell {
  Index n = 0;
  Method method = Method::Mgn;
};

std::string clean(std::string msg) {
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

// Runs job(i) for i in [0, count) on up to `threads` workers.
void run_parallel(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<Cell> make_cells(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (Index n : spec.n_list)
    for (Method m : spec.methods) cells.push_back({n, m});
  return cells;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

std::string plot_script(const std::string& csv, const std::string& x, const std::string& y, bool logx, bool logy,
                        const std::string& png) {
  std::string s;
  s += "import csv\nimport math\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
  s += "rows = list(csv.DictReader(open('" + csv + "')))\n";
  s += "series = {}\n";
  s += "for row in rows:\n";
  s += "    if row.get('status', 'ok') != 'ok' or row['" + y + "'] in ('', 'nan'):\n        continue\n";
  s += "    series.setdefault(row['method'], []).append((float(row['" + x + "']), float(row['" + y + "'])))\n";
  s += "fig, ax = plt.subplots()\n";
  s += "for method, pts in sorted(series.items()):\n";
  s += "    pts.sort()\n";
  s += "    ax.plot([p[0] for p in pts], [abs(p[1]) for p in pts], marker='o', label=method)\n";
  if (logx) s += "ax.set_xscale('log')\n";
  if (logy) s += "ax.set_yscale('log')\n";
  s += "ax.set_xlabel('" + x + "')\nax.set_ylabel('" + y + "')\nax.legend()\n";
  s += "fig.savefig('" + png + "', dpi=120)\n";
  return s;
}

struct Row {
  std::vector<std::string> cells;
  bool failed = false;
  bool unavailable = false;
};

Row known_minimum_row(const Cell& c) {
  Row row;
  const KnownMinimumProblem prob = build_known_minimum(c.n);
  const WeightSpec w = WeightSpec::identity(c.n);
  SolverConfig cfg;
  cfg.method = c.method;
  const GlrrVector a0(VectorXd(prob.a_star.coeffs().array() + 1e-6));
  try {
    const FitResult res = fit(prob.x, 3, w, cfg, a0);
    const VectorXd& x = prob.x.values();
    const double dist = (res.signal - prob.y_star.values()).norm();
    const double gap = (x - res.signal).norm() - (x - prob.y_star.values()).norm();
    row.cells = {std::to_string(c.n),
                 to_string(c.method),
                 "ok",
                 std::to_string(res.trace.steps()),
                 to_string(res.trace.termination),
                 format_double(dist),
                 format_double(glrr_relative_residual(res.glrr, res.signal)),
                 format_double(gap),
                 format_double(stationarity_measure(res.glrr, w, x, res.signal)),
                 ""};
  } catch (const Error& e) {
    row.failed = true;
    row.cells = {std::to_string(c.n), to_string(c.method), "failed", "", "", "", "", "", "", clean(e.what())};
  }
  return row;
}

ExperimentSummary finish(const ExperimentSpec& spec, const std::vector<std::string>& header,
                         const std::vector<Row>& rows, const std::string& stem, const std::string& x,
                         const std::string& y, bool logx, bool logy) {
  ExperimentSummary sum;
  CsvTable table(header);
  for (const auto& r : rows) {
    table.add_row(r.cells);
    ++sum.cells;
    sum.failed += r.failed ? 1 : 0;
    sum.unavailable += r.unavailable ? 1 : 0;
  }
  const std::filesystem::path dir(spec.out_dir);
  const std::string csv = (dir / (stem + ".csv")).string();
  table.write(csv);
  const std::string py = (dir / ("plot_" + stem + ".py")).string();
  write_text(py, plot_script(stem + ".csv", x, y, logx, logy, stem + ".png"));
  sum.files = {csv, py};
  return sum;
}

ExperimentSummary known_minimum_accuracy(const ExperimentSpec& spec, int threads) {
  const auto cells = make_cells(spec);
  std::vector<Row> rows(cells.size());
  run_parallel(cells.size(), threads, [&](std::size_t i) { rows[i] = known_minimum_row(cells[i]); });
  return finish(spec,
                {"N", "method", "status", "iterations", "termination", "distance", "rel_residual", "obj_gap",
                 "stationarity", "message"},
                rows, "known_minimum_accuracy", "N", "distance", true, true);
}

ExperimentSummary residual_vs_n(const ExperimentSpec& spec, int threads) {
  const auto cells = make_cells(spec);
  std::vector<Row> rows(cells.size());
  run_parallel(cells.size(), threads, [&](std::size_t i) {
    const Cell& c = cells[i];
    const KnownMinimumProblem prob = build_known_minimum(c.n);
    const WeightSpec w = WeightSpec::identity(c.n);
    SolverConfig cfg;
    cfg.method = c.method;
    const GlrrVector a0(VectorXd(prob.a_star.coeffs().array() + 1e-6));
    Row row;
    try {
      const FitResult res = fit(prob.x, 3, w, cfg, a0);
      const RotatedSpectrum spec_final = rotated_spectrum(res.glrr, c.n, HornerMode::Compensated);
      row.cells = {std::to_string(c.n),
                   to_string(c.method),
                   "ok",
                   format_double(glrr_relative_residual(res.glrr, res.signal)),
                   format_double(spec_final.min_abs() / res.glrr.coeffs().norm()),
                   std::to_string(res.trace.steps()),
                   ""};
    } catch (const Error& e) {
      row.failed = true;
      row.cells = {std::to_string(c.n), to_string(c.method), "failed", "", "", "", clean(e.what())};
    }
    rows[i] = std::move(row);
  });
  return finish(spec, {"N", "method", "status", "rel_residual", "lambda_min", "iterations", "message"}, rows,
                "residual_vs_N", "N", "rel_residual", true, true);
}

ExperimentSummary iteration_timing(const ExperimentSpec& spec) {
  const auto cells = make_cells(spec);
  std::vector<Row> rows(cells.size());
  std::vector<double> seconds(cells.size(), -1.0);
  VectorXd phi(1);
  phi << 0.5;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    Row row;
    const KnownMinimumProblem prob = build_known_minimum(c.n);
    const WeightSpec w = ar_inverse_covariance(phi, 1.0, c.n);
    const NormalizedGlrr start = normalize_glrr(GlrrVector(VectorXd(prob.a_star.coeffs().array() + 1e-6)));
    try {
      double best = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < std::max(1, spec.timing_repeats); ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const StepResult step = solver_step(c.method, start.adot, start.pivot, prob.x.values(), w);
        const auto t1 = std::chrono::steady_clock::now();
        if (!step.direction.allFinite()) throw Error("non-finite step direction");
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
      }
      seconds[i] = best;
      row.cells = {std::to_string(c.n), to_string(c.method), "ok", format_double(best), "", ""};
    } catch (const UnsupportedWeights& e) {
      row.unavailable = true;
      row.cells = {std::to_string(c.n), to_string(c.method), "unavailable", "", "", clean(e.what())};
    } catch (const Error& e) {
      row.failed = true;
      row.cells = {std::to_string(c.n), to_string(c.method), "failed", "", "", clean(e.what())};
    }
    rows[i] = std::move(row);
  }
  // Normalize each method by its time at the smallest length.
  for (Method m : spec.methods) {
    double base = -1.0;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].method == m && seconds[i] > 0.0) {
        base = seconds[i];
        break;
      }
    if (base <= 0.0) continue;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].method == m && seconds[i] > 0.0) rows[i].cells[4] = format_double(seconds[i] / base);
  }
  return finish(spec, {"N", "method", "status", "step_seconds", "normalized_time", "message"}, rows,
                "iteration_timing", "N", "normalized_time", true, true);
}

ExperimentSummary gapped_fit(const ExperimentSpec& spec, int threads) {
  const VectorXd signal = ishteva50_signal();
  const TimeSeries x = apply_gaps(add_relative_noise(signal, 0.2, spec.seed), parse_ranges("10-19,35-39"));
  const WeightSpec w = mask_missing(WeightSpec::identity(x.size()), x.mask());
  const auto& methods = spec.methods;
  std::vector<Row> rows(methods.size());
  std::vector<VectorXd> fitted(methods.size());
  run_parallel(methods.size(), threads, [&](std::size_t i) {
    SolverConfig cfg;
    cfg.method = methods[i];
    Row row;
    try {
      const FitResult res = fit(x, 4, w, cfg);
      fitted[i] = res.signal;
      row.cells = {"50",
                   to_string(methods[i]),
                   "ok",
                   std::to_string(res.trace.steps()),
                   format_double((res.signal - signal).norm() / signal.norm()),
                   format_double(glrr_relative_residual(res.glrr, res.signal)),
                   ""};
    } catch (const UnsupportedWeights& e) {
      row.unavailable = true;
      row.cells = {"50", to_string(methods[i]), "unavailable", "", "", "", clean(e.what())};
    } catch (const Error& e) {
      row.failed = true;
      row.cells = {"50", to_string(methods[i]), "failed", "", "", "", clean(e.what())};
    }
    rows[i] = std::move(row);
  });

  ExperimentSummary sum;
  CsvTable summary({"N", "method", "status", "iterations", "rel_error", "rel_residual", "message"});
  for (const auto& r : rows) {
    summary.add_row(r.cells);
    ++sum.cells;
    sum.failed += r.failed ? 1 : 0;
    sum.unavailable += r.unavailable ? 1 : 0;
  }
  std::vector<std::string> header = {"index", "signal", "observed"};
  for (Method m : methods) header.push_back("fitted_" + to_string(m));
  CsvTable series(header);
  for (Index i = 0; i < x.size(); ++i) {
    std::vector<std::string> line = {std::to_string(i + 1), format_double(signal[i]),
                                     x.mask()[i] ? format_double(x.values()[i]) : std::string()};
    for (const auto& f : fitted) line.push_back(f.size() ? format_double(f[i]) : std::string());
    series.add_row(std::move(line));
  }
  const std::filesystem::path dir(spec.out_dir);
  const std::string summary_path = (dir / "gapped_fit_summary.csv").string();
  const std::string series_path = (dir / "gapped_fit.csv").string();
  const std::string py_path = (dir / "plot_gapped_fit.py").string();
  summary.write(summary_path);
  series.write(series_path);
  std::string py;
  py += "import csv\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
  py += "rows = list(csv.DictReader(open('gapped_fit.csv')))\n";
  py += "idx = [int(r['index']) for r in rows]\n";
  py += "def col(name):\n    return [float(r[name]) if r[name] not in ('', 'nan') else float('nan') for r in rows]\n";
  py += "fig, ax = plt.subplots()\n";
  py += "ax.plot(idx, col('signal'), 'k-', label='signal')\n";
  py += "ax.plot(idx, col('observed'), 'k.', label='observed')\n";
  py += "for name in rows[0].keys():\n";
  py += "    if name.startswith('fitted_') and any(r[name] for r in rows):\n";
  py += "        ax.plot(idx, col(name), label=name[7:])\n";
  py += "ax.legend()\nfig.savefig('gapped_fit.png', dpi=120)\n";
  write_text(py_path, py);
  sum.files = {summary_path, series_path, py_path};
  return sum;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::KnownMinimumAccuracy: return "known_minimum_accuracy";
    case ExperimentKind::ResidualVsN: return "residual_vs_N";
    case ExperimentKind::IterationTiming: return "iteration_timing";
    case ExperimentKind::GappedFit: return "gapped_fit";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::KnownMinimumAccuracy, ExperimentKind::ResidualVsN, ExperimentKind::IterationTiming,
                 ExperimentKind::GappedFit})
    if (name == to_string(k)) return k;
  if (name == "residual_vs_n") return ExperimentKind::ResidualVsN;
  throw InvalidArgument("unknown experiment kind '" + name + "'");
}

int worker_count(int requested, std::size_t cells) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("HMGN_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(cells, 1)));
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
  if (spec.methods.empty()) throw InvalidArgument("experiment: no methods given");
  if (spec.kind != ExperimentKind::GappedFit) {
    if (spec.n_list.empty()) throw InvalidArgument("experiment: empty N list");
    for (std::size_t i = 0; i < spec.n_list.size(); ++i) {
      if (spec.n_list[i] < 13) throw InvalidArgument("experiment: N must be at least 13");
      if (i > 0 && spec.n_list[i] <= spec.n_list[i - 1])
        throw InvalidArgument("experiment: N list must be strictly increasing");
      if (!spec.allow_large && spec.n_list[i] > kDefaultMaxLength)
        throw InvalidArgument("experiment: N above 10000 requires the large-N flag");
    }
  }
  std::filesystem::create_directories(spec.out_dir);
  const int threads = worker_count(spec.threads, spec.n_list.size() * spec.methods.size());
  switch (spec.kind) {
    case ExperimentKind::KnownMinimumAccuracy: return known_minimum_accuracy(spec, threads);
    case ExperimentKind::ResidualVsN: return residual_vs_n(spec, threads);
    case ExperimentKind::IterationTiming: return iteration_timing(spec);
    case ExperimentKind::GappedFit: return gapped_fit(spec, worker_count(spec.threads, spec.methods.size()));
  }
  throw InvalidArgument("experiment: unknown kind");
}

}  // namespace hmgn
