#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "hmgn/csv_io.hpp"
#include "hmgn/datasets.hpp"
#include "hmgn/experiments.hpp"
#include "hmgn/solvers.hpp"
#include "test_support.hpp"

using namespace hmgn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hmgn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "hmgn");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_SUITE("known minimum") {
  TEST_CASE("construction invariants") {
    for (Index n : {13, 20, 100, 1000}) {
      const KnownMinimumProblem km = build_known_minimum(n);
      const VectorXd& y = km.y_star.values();
      CHECK(std::abs(y.norm() - 1.0) <= 1e-14);
      CHECK(glrr_residual(km.a_star.coeffs(), y).norm() <= 1e-10);
      CHECK((km.tangent_basis.transpose() * (km.x.values() - y)).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((km.tangent_basis.transpose() * km.tangent_basis - MatrixXd::Identity(6, 6)).norm() <= 1e-12);
      CHECK(km.x.fully_observed());
    }
    CHECK_THROWS_AS(build_known_minimum(12), InvalidArgument);
  }

  TEST_CASE("Legendre basis spans the low-degree monomials") {
    for (Index n : {13, 50, 400}) {
      MatrixXd mono(n, 6);
      for (Index i = 0; i < n; ++i) {
        const double t = -1.0 + 2.0 * double(i) / double(n - 1);
        for (Index k = 0; k < 6; ++k) mono(i, k) = std::pow(t, double(k));
      }
      const MatrixXd q = hmgn::testing::orthonormalize(mono);
      CHECK(hmgn::testing::subspace_distance(q, legendre_basis(n, 5)) <= 1e-8);
    }
  }

  TEST_CASE("tangent basis matches the GLRR of a*^2") {
    const KnownMinimumProblem km = build_known_minimum(80);
    const GlrrVector a2 = acyclic_self_convolution(km.a_star);
    for (Index c = 0; c < 6; ++c)
      CHECK(glrr_residual(a2.coeffs(), VectorXd(km.tangent_basis.col(c))).norm() <= 1e-12);
  }
}

TEST_SUITE("datasets") {
  TEST_CASE("benchmark series formula") {
    const VectorXd s = ishteva50_signal();
    REQUIRE(s.size() == 50);
    for (Index i = 1; i <= 50; ++i) {
      const double expected = std::pow(0.9, double(i)) * std::cos(std::numbers::pi * double(i) / 5.0) +
                              0.2 * std::pow(1.05, double(i)) *
                                  std::cos(std::numbers::pi * double(i) / 12.0 + std::numbers::pi / 4.0);
      CHECK(s[i - 1] == doctest::Approx(expected).epsilon(1e-14));
    }
    const std::vector<SignalComponent> comps{{VectorXd::Ones(1), std::log(0.9), 0.1, std::numbers::pi / 2},
                                             {VectorXd::Constant(1, 0.2), std::log(1.05), 1.0 / 24.0,
                                              3.0 * std::numbers::pi / 4.0}};
    CHECK(model_rank(comps) == 4);
    CHECK((generate_model_signal(comps, 50).values() - s).norm() <= 1e-12);
  }

  TEST_CASE("relative noise") {
    const VectorXd s = ishteva50_signal();
    const VectorXd a = add_relative_noise(s, 0.2, 1);
    CHECK(std::abs((a - s).norm() - 0.2 * s.norm()) <= 1e-12);
    CHECK(a == add_relative_noise(s, 0.2, 1));
    CHECK(a != add_relative_noise(s, 0.2, 2));
    CHECK(add_relative_noise(s, 0.0, 1) == s);
  }

  TEST_CASE("ranges and gaps") {
    const auto r = parse_ranges("10-19,35-39");
    REQUIRE(r.size() == 2);
    CHECK(r[0] == std::pair<Index, Index>{10, 19});
    CHECK(r[1] == std::pair<Index, Index>{35, 39});
    CHECK(parse_ranges("7") == std::vector<std::pair<Index, Index>>{{7, 7}});
    CHECK_THROWS_AS(parse_ranges("5-3"), InvalidArgument);
    CHECK_THROWS_AS(parse_ranges("0-2"), InvalidArgument);
    CHECK_THROWS_AS(parse_ranges("x"), InvalidArgument);

    const TimeSeries g = apply_gaps(VectorXd::LinSpaced(50, 1, 50), r);
    CHECK(g.observed_count() == 35);
    CHECK(g.mask()[8]);
    CHECK_FALSE(g.mask()[9]);
    CHECK_FALSE(g.mask()[18]);
    CHECK(g.mask()[19]);
    CHECK_THROWS_AS(apply_gaps(VectorXd::Ones(20), parse_ranges("15-25")), InvalidArgument);
  }

  TEST_CASE("component strings") {
    const auto c = parse_components("p=1,2:a=-0.1:w=0.25:phi=1.5;w=0.5:phi=1");
    REQUIRE(c.size() == 2);
    CHECK(c[0].poly.size() == 2);
    CHECK(c[0].poly[1] == 2.0);
    CHECK(c[0].alpha == -0.1);
    CHECK(c[0].omega == 0.25);
    CHECK(c[0].phi == 1.5);
    CHECK(c[1].poly.size() == 1);
    CHECK(c[1].omega == 0.5);
    CHECK(model_rank(c) == 5);
    CHECK_THROWS_AS(parse_components("q=1"), InvalidArgument);
    CHECK_THROWS_AS(parse_components("w=abc"), InvalidArgument);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("series round trip is bitwise") {
    std::mt19937_64 gen(3);
    VectorXd v = hmgn::testing::random_vector(gen, 200);
    for (Index i = 0; i < v.size(); i += 7) v[i] *= 1e-300;
    v[3] = 1e308;
    v[4] = -0.0;
    v[5] = 0.1;
    v[11] = std::numeric_limits<double>::quiet_NaN();
    const TimeSeries s = TimeSeries::from_nan_coded(v);
    std::stringstream buf;
    write_series_csv(buf, s);
    const TimeSeries back = parse_series_csv(buf);
    REQUIRE(back.size() == s.size());
    CHECK((back.mask() == s.mask()).all());
    for (Index i = 0; i < v.size(); ++i)
      if (s.mask()[i]) CHECK(std::bit_cast<std::uint64_t>(back.values()[i]) == std::bit_cast<std::uint64_t>(v[i]));
  }

  TEST_CASE("reading") {
    std::istringstream in("index,value\n1,2.5\n2,\n3,nan\n4,-1e-3\n");
    const TimeSeries s = parse_series_csv(in);
    REQUIRE(s.size() == 4);
    CHECK(s.observed_count() == 2);
    CHECK(s.values()[3] == -1e-3);
    std::istringstream bad("value\n1\nabc\n");
    CHECK_THROWS_AS(parse_series_csv(bad), InvalidArgument);
    CHECK(format_double(0.1) == "0.1");
  }
}

TEST_SUITE("command line") {
  TEST_CASE("usage errors") {
    CHECK(run_cli({}) == cli::kExitUsage);
    CHECK(run_cli({"fit", "--bogus"}) == cli::kExitUsage);
    CHECK(run_cli({"frobnicate"}) == cli::kExitUsage);
    std::string err;
    CHECK(run_cli({"fit", "--input", "nowhere.csv"}, &err) == cli::kExitUsage);
    CHECK(err.find("rank") != std::string::npos);
    CHECK_THROWS_AS(cli::parse_weight_spec("ar:1.5", 20), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_weight_spec("banana", 20), InvalidArgument);
    CHECK(cli::parse_weight_spec("ma:0.5", 20).kind() == WeightKind::BandedInverse);
    CHECK(cli::parse_weight_spec("identity", 20).kind() == WeightKind::Identity);
  }

  TEST_CASE("noiseless rank-2 fit") {
    const fs::path dir = scratch_dir("noiseless");
    const std::string data = (dir / "s.csv").string();
    REQUIRE(run_cli({"generate", "--components", "p=1:w=0.1:phi=0.3", "--length", "40", "--zero-noise", "--out",
                     data}) == cli::kExitOk);
    const std::string out = (dir / "fit.csv").string();
    REQUIRE(run_cli({"fit", "--input", data, "--rank", "2", "--out", out}) == cli::kExitOk);
    const nlohmann::json meta = read_json(dir / "fit.json");
    CHECK(meta["method"] == "s-mgn");
    CHECK(meta["rank"] == 2);
    CHECK(meta["weighted_residual"].get<double>() <= 1e-8);
    CHECK(meta["glrr"].size() == 3);
    CHECK(meta["glrr_relative_residual"].get<double>() <= 1e-8);
    CHECK(lines_of(out).size() == 41);
  }

  TEST_CASE("gapped benchmark fit") {
    const fs::path dir = scratch_dir("gapped");
    const std::string data = (dir / "g.csv").string();
    REQUIRE(run_cli({"generate", "--preset", "ishteva50", "--gaps", "10-19,35-39", "--seed", "1", "--out", data}) ==
            cli::kExitOk);
    const auto rows = lines_of(data);
    REQUIRE(rows.size() == 51);
    for (Index i = 1; i <= 50; ++i) {
      const bool gap = (i >= 10 && i <= 19) || (i >= 35 && i <= 39);
      CHECK(rows[static_cast<std::size_t>(i)].empty() == gap);
    }
    const std::string out = (dir / "fit.csv").string();
    REQUIRE(run_cli({"fit", "--input", data, "--rank", "4", "--method", "mgn", "--out", out}) == cli::kExitOk);
    const auto fitted = lines_of(out);
    REQUIRE(fitted.size() == 51);
    CHECK(fitted[0] == "index,observed,fitted");
    for (std::size_t i = 1; i < fitted.size(); ++i) {
      const auto cells = split(fitted[i], ',');
      REQUIRE(cells.size() == 3);
      CHECK(std::isfinite(std::stod(cells[2])));
    }
    const nlohmann::json meta = read_json(dir / "fit.json");
    CHECK(meta["weighted_residual"].get<double>() <= meta["initial_weighted_residual"].get<double>());
    CHECK(run_cli({"fit", "--input", data, "--rank", "4", "--method", "vpgn", "--out", out}) ==
          cli::kExitSolveFailure);
  }

  TEST_CASE("zero-noise preset is exactly rank 4") {
    const fs::path dir = scratch_dir("preset");
    const std::string data = (dir / "p.csv").string();
    REQUIRE(run_cli({"generate", "--preset", "ishteva50", "--zero-noise", "--out", data}) == cli::kExitOk);
    const TimeSeries s = read_series_csv(data);
    const GlrrVector a = initial_glrr(s, 4);
    CHECK(glrr_residual(a.coeffs(), s.values()).norm() <= 1e-8 * s.values().norm());
    CHECK((s.values() - ishteva50_signal()).norm() == 0.0);
  }

  TEST_CASE("initial GLRR from a file and weight options") {
    const fs::path dir = scratch_dir("a0");
    const std::string data = (dir / "s.csv").string();
    REQUIRE(run_cli({"generate", "--preset", "ishteva50", "--noise", "0.05", "--out", data}) == cli::kExitOk);
    const std::string a0 = (dir / "a0.csv").string();
    write_series_csv(a0, TimeSeries(initial_glrr(read_series_csv(data), 4).coeffs()));
    const std::string out = (dir / "fit.csv").string();
    CHECK(run_cli({"fit", "--input", data, "--rank", "4", "--a0", a0, "--weights", "ma:0.3", "--method", "vpgn",
                   "--out", out}) == cli::kExitOk);
    CHECK(run_cli({"fit", "--input", data, "--rank", "4", "--weights", "ar:0.4", "--max-iter", "3", "--out", out}) ==
          cli::kExitOk);
    CHECK(read_json(dir / "fit.json")["iterations"].get<int>() <= 3);
    CHECK(run_cli({"fit", "--input", data, "--rank", "3", "--a0", a0, "--out", out}) == cli::kExitUsage);
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("known-minimum accuracy is deterministic and accurate") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::KnownMinimumAccuracy;
    spec.n_list = {20, 100, 1000};
    spec.methods = {Method::Mgn, Method::SMgn};
    spec.seed = 5;
    spec.threads = 2;
    spec.out_dir = scratch_dir("exp1").string();
    const ExperimentSummary first = run_experiment(spec);
    spec.out_dir = scratch_dir("exp2").string();
    const ExperimentSummary second = run_experiment(spec);
    CHECK(first.cells == 6);
    CHECK(first.failed == 0);
    REQUIRE(first.files.size() == second.files.size());
    for (std::size_t i = 0; i < first.files.size(); ++i) CHECK(slurp(first.files[i]) == slurp(second.files[i]));

    const auto rows = lines_of(first.files[0]);
    const auto header = split(rows[0], ',');
    const auto col = std::find(header.begin(), header.end(), "rel_residual") - header.begin();
    int smgn_rows = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto cells = split(rows[i], ',');
      if (cells[1] != "s-mgn") continue;
      ++smgn_rows;
      CHECK(std::stod(cells[static_cast<std::size_t>(col)]) <= 1e-8);
    }
    CHECK(smgn_rows == 3);
    CHECK(fs::exists(fs::path(spec.out_dir) / "plot_known_minimum_accuracy.py"));
  }

  TEST_CASE("gapped fit and timing tables") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::GappedFit;
    spec.n_list = {50};
    spec.methods = {Method::Mgn, Method::SMgn, Method::Vpgn};
    spec.out_dir = scratch_dir("exp3").string();
    const ExperimentSummary g = run_experiment(spec);
    CHECK(g.unavailable == 1);
    CHECK(g.failed == 0);

    spec.kind = ExperimentKind::IterationTiming;
    spec.n_list = {100, 200};
    spec.methods = {Method::SMgn, Method::Vpgn};
    spec.timing_repeats = 1;
    const ExperimentSummary t = run_experiment(spec);
    CHECK(t.cells == 4);
    CHECK(t.failed == 0);
  }

  TEST_CASE("command line experiment") {
    const fs::path dir = scratch_dir("exp4");
    CHECK(run_cli({"experiment", "--kind", "residual_vs_N", "--n-list", "20,40", "--methods", "s-mgn", "--out-dir",
                   dir.string()}) == cli::kExitOk);
    CHECK(fs::exists(dir / "residual_vs_N.csv"));
    CHECK(run_cli({"experiment", "--kind", "residual_vs_N", "--n-list", "40,20", "--out-dir", dir.string()}) ==
          cli::kExitUsage);
    CHECK(run_cli({"experiment", "--kind", "nope", "--n-list", "20", "--out-dir", dir.string()}) == cli::kExitUsage);
  }

  TEST_CASE("invalid experiment settings") {
    ExperimentSpec spec;
    spec.n_list = {100, 20000};
    spec.methods = {Method::SMgn};
    spec.out_dir = scratch_dir("exp5").string();
    CHECK_THROWS_AS(run_experiment(spec), InvalidArgument);
    spec.n_list = {};
    CHECK_THROWS_AS(run_experiment(spec), InvalidArgument);
    CHECK(worker_count(1, 10) == 1);
    CHECK(worker_count(8, 3) == 3);
    CHECK(worker_count(0, 5) >= 1);
  }
}
