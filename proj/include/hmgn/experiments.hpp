#pragma once

// Batch comparisons of the solver variants. Each experiment writes one or
// two CSV tables and a matplotlib script that renders them.

#include <cstdint>
#include <string>
#include <vector>

#include "hmgn/solvers.hpp"

namespace hmgn {

enum class ExperimentKind { KnownMinimumAccuracy, ResidualVsN, IterationTiming, GappedFit };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::KnownMinimumAccuracy;
  std::vector<Index> n_list;
  std::vector<Method> methods;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  /// Lengths above 10^4 are refused unless set.
  bool allow_large = false;
  /// Worker threads for independent cells; 0 reads HMGN_THREADS, falling
  /// back to the hardware concurrency. Timing cells always run one by one.
  int threads = 0;
  /// Repetitions per timing cell; the fastest one is reported.
  int timing_repeats = 3;
};

struct ExperimentSummary {
  std::vector<std::string> files;
  int cells = 0;
  int failed = 0;
  int unavailable = 0;
};

/// Validates the experiment settings and runs them. Solver failures are reported per row.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

/// Number of worker threads for `cells` independent jobs.
int worker_count(int requested, std::size_t cells);

}  // namespace hmgn
