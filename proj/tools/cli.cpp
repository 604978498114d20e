#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "hmgn/csv_io.hpp"
#include "hmgn/datasets.hpp"
#include "hmgn/experiments.hpp"
#include "hmgn/solvers.hpp"

namespace hmgn::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("cannot parse " + what + " '" + text + "'");
}

VectorXd parse_list(const std::string& text, const std::string& what) {
  const auto parts = split(text, ',');
  if (parts.empty()) throw InvalidArgument("empty " + what + " list");
  VectorXd v(static_cast<Index>(parts.size()));
  for (std::size_t k = 0; k < parts.size(); ++k) v[static_cast<Index>(k)] = to_double(parts[k], what);
  return v;
}

std::string default_meta_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".json");
  return p.string();
}

struct FitArgs {
  std::string input;
  Index rank = 0;
  std::string method = "s-mgn";
  std::string weights = "identity";
  int max_iter = 200;
  std::string a0;
  std::string out = "fit.csv";
  std::string meta;
};

struct GenerateArgs {
  std::string preset;
  std::string components;
  Index length = 0;
  std::string gaps;
  double noise = 0.2;
  bool zero_noise = false;
  std::uint64_t seed = 1;
  std::string out;
};

struct ExperimentArgs {
  std::string kind;
  std::string n_list;
  std::string methods = "mgn,s-mgn,vpgn,s-vpgn";
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool allow_large = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  TimeSeries x;
  std::optional<WeightSpec> w;
  SolverConfig config;
  std::optional<GlrrVector> a0;
  try {
    x = read_series_csv(a.input);
    w = parse_weight_spec(a.weights, x.size());
    config.method = parse_method(a.method);
    config.max_iter = a.max_iter;
    if (!a.a0.empty()) {
      const TimeSeries coeffs = read_series_csv(a.a0);
      if (!coeffs.fully_observed()) throw InvalidArgument("--a0 file has missing entries");
      a0 = GlrrVector(coeffs.values());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  FitResult res;
  try {
    res = fit(x, a.rank, *w, config, a0);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "solve failed: " << e.what() << "\n";
    return kExitSolveFailure;
  }

  const std::string meta_path = a.meta.empty() ? default_meta_path(a.out) : a.meta;
  const auto& last = res.trace.iterations.back();
  nlohmann::ordered_json meta;
  meta["method"] = to_string(config.method);
  meta["rank"] = a.rank;
  meta["iterations"] = res.trace.steps();
  meta["termination"] = to_string(res.trace.termination);
  meta["weighted_residual"] = last.residual;
  meta["initial_weighted_residual"] = res.trace.iterations.front().residual;
  meta["glrr"] = std::vector<double>(res.glrr.coeffs().begin(), res.glrr.coeffs().end());
  meta["glrr_relative_residual"] = glrr_relative_residual(res.glrr, res.signal);
  try {
    write_fit_csv(a.out, x, res.signal);
    std::ofstream m(meta_path);
    if (!m) throw InvalidArgument("cannot write '" + meta_path + "'");
    m << meta.dump(2) << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << "method " << to_string(config.method) << ", " << res.trace.steps() << " steps ("
      << to_string(res.trace.termination) << "), residual " << format_double(last.residual) << "\n";
  return kExitOk;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  try {
    if (a.preset.empty() == a.components.empty()) throw InvalidArgument("give exactly one of --preset and --components");
    VectorXd s;
    if (!a.preset.empty()) {
      if (a.preset != "ishteva50") throw InvalidArgument("unknown preset '" + a.preset + "'");
      s = ishteva50_signal();
    } else {
      if (a.length < 1) throw InvalidArgument("--components needs a positive --length");
      const auto components = parse_components(a.components);
      model_rank(components);  // rejects components that vanish identically
      s = generate_model_signal(components, a.length).values();
    }
    const double level = a.zero_noise ? 0.0 : a.noise;
    const VectorXd y = add_relative_noise(s, level, a.seed);
    const TimeSeries series = apply_gaps(y, parse_ranges(a.gaps));
    write_series_csv(a.out, series);
    out << "wrote " << series.size() << " values to " << a.out << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec.kind = parse_experiment_kind(a.kind);
    for (const auto& item : split(a.n_list, ',')) {
      const double v = to_double(item, "N");
      if (v != static_cast<double>(static_cast<Index>(v))) throw InvalidArgument("N must be an integer");
      spec.n_list.push_back(static_cast<Index>(v));
    }
    for (const auto& item : split(a.methods, ',')) spec.methods.push_back(parse_method(item));
    spec.seed = a.seed;
    spec.out_dir = a.out_dir;
    spec.allow_large = a.allow_large;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const ExperimentSummary summary = run_experiment(spec);
    for (const auto& f : summary.files) out << "wrote " << f << "\n";
    out << summary.cells << " cells, " << summary.failed << " failed, " << summary.unavailable << " unavailable\n";
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "experiment failed: " << e.what() << "\n";
    return kExitSolveFailure;
  }
  return kExitOk;
}

}  // namespace

WeightSpec parse_weight_spec(const std::string& text, Index n) {
  if (text == "identity") return WeightSpec::identity(n);
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 3 || (parts[0] != "ar" && parts[0] != "ma"))
    throw InvalidArgument("weights must be identity, ar:phi[,...][:sigma2] or ma:theta[,...][:sigma2]");
  const VectorXd coeffs = parse_list(parts[1], "coefficient");
  const double sigma2 = parts.size() == 3 ? to_double(parts[2], "sigma2") : 1.0;
  if (parts[0] == "ar") return ar_inverse_covariance(coeffs, sigma2, n);
  return ma_covariance_weights(coeffs, sigma2, n);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hankel low-rank signal estimation", "hmgn"};
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate a low-rank signal from a CSV series");
  fit_cmd->add_option("--input", fa.input, "Input CSV (empty or nan cells are missing)")->required();
  fit_cmd->add_option("--rank", fa.rank, "Signal rank r")->required()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--method", fa.method, "mgn, s-mgn, vpgn or s-vpgn")->capture_default_str();
  fit_cmd->add_option("--weights", fa.weights, "identity | ar:phi1[,...][:sigma2] | ma:theta1[,...][:sigma2]")
      ->capture_default_str();
  fit_cmd->add_option("--max-iter", fa.max_iter, "Iteration limit")->capture_default_str()->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--a0", fa.a0, "CSV with r+1 initial GLRR coefficients");
  fit_cmd->add_option("--out", fa.out, "Output CSV (index, observed, fitted)")->capture_default_str();
  fit_cmd->add_option("--meta", fa.meta, "Metadata JSON (default: output path with .json)");

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic series");
  gen_cmd->add_option("--preset", ga.preset, "Named series (ishteva50)");
  gen_cmd->add_option("--components", ga.components, "p=c0,c1:a=alpha:w=omega:phi=phase;...");
  gen_cmd->add_option("--length", ga.length, "Length for --components");
  gen_cmd->add_option("--gaps", ga.gaps, "1-based ranges to blank, e.g. 10-19,35-39");
  gen_cmd->add_option("--noise", ga.noise, "Noise level relative to the signal norm")->capture_default_str();
  gen_cmd->add_flag("--zero-noise", ga.zero_noise, "Write the exact signal");
  gen_cmd->add_option("--seed", ga.seed, "Seed of the mt19937_64 noise generator")->capture_default_str();
  gen_cmd->add_option("--out", ga.out, "Output CSV")->required();

  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a comparison and write CSV tables and plot scripts");
  exp_cmd->add_option("--kind", ea.kind, "known_minimum_accuracy | residual_vs_N | iteration_timing | gapped_fit")
      ->required();
  exp_cmd->add_option("--n-list", ea.n_list, "Strictly increasing lengths, e.g. 20,100,1000")->required();
  exp_cmd->add_option("--methods", ea.methods, "Comma-separated methods")->capture_default_str();
  exp_cmd->add_option("--seed", ea.seed, "Seed")->capture_default_str();
  exp_cmd->add_option("--out-dir", ea.out_dir, "Output directory")->capture_default_str();
  exp_cmd->add_flag("--allow-large", ea.allow_large, "Permit lengths above 10000");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*fit_cmd) return cmd_fit(fa, out, err);
  if (*gen_cmd) return cmd_generate(ga, out, err);
  return cmd_experiment(ea, out, err);
}

}  // namespace hmgn::cli
