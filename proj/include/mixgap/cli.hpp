#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mixgap/confidence.hpp"

namespace mixgap::cli {

enum ExitCode : int {
  kOk = 0,
  kParse = 2,
  kNonErgodic = 3,
  kPrecondition = 4,
  kSolver = 5,
};

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct CoverageOptions {
  std::int64_t m = 100000;
  int runs = 200;
  int K = 10;
  double alpha = 1.0;
  double delta = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: MIXGAP_THREADS or hardware concurrency
};

struct CoverageResult {
  double true_pssg_dilated = 0.0;
  double true_pimin = 0.0;
  int runs = 0;
  int covered_pssg = 0;
  int covered_pimin = 0;
  int finite_pssg = 0;  // runs whose pssg half-width is finite
  double mean_half_width_pssg = 0.0;
  double mean_half_width_pimin = 0.0;
  double mean_point_pssg = 0.0;
  double mean_point_pimin = 0.0;

  double coverage_pssg() const { return runs ? static_cast<double>(covered_pssg) / runs : 0.0; }
  double coverage_pimin() const { return runs ? static_cast<double>(covered_pimin) / runs : 0.0; }
};

/// Independent stationary-start trajectories, run r seeded with the r-th
/// SplitMix64 output of `seed`. Runs are spread over worker threads and
/// reduced in run order.
CoverageResult coverage_experiment(const TransitionMatrix& m, const CoverageOptions& opts);

/// Worker count: MIXGAP_THREADS when set and positive, else hardware concurrency.
unsigned worker_count(unsigned requested = 0);

}  // namespace mixgap::cli
