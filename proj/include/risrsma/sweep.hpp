// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risrsma/algorithm.hpp"

namespace risrsma {

enum class SweepAxis { kPower, kElements };

const char* to_string(SweepAxis a);

struct SweepSettings {
  std::vector<double> power_dbw{5.0, 10.0, 15.0, 20.0, 25.0};  // total, split equally
  std::vector<int> elements{8, 16, 32, 64, 128};
  int trials = 10;
  int threads = 0;  // 0: one per hardware thread
  std::vector<Scheme> schemes = all_schemes();
};

// Unsplit budgets for one sweep point: a power point sets
// P_bs_max = P_a_max = P/2, an element point sets L.
ScenarioConfig sweep_point_config(const ScenarioConfig& base, SweepAxis axis, double x);

// Trial t of every point and scheme uses seed base.seed + t, so schemes and
// points are compared on the same channel draws.
std::uint64_t trial_seed(const ScenarioConfig& base, int trial);

struct RunRecord {
  Scheme scheme = Scheme::kActiveRsma;
  double x = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  bool converged = false;
  bool invariants = false;  // see invariants_hold()
  int iterations = 0;
  double sum_rate = 0.0;
  double wall_time_s = 0.0;
  std::string status;
};

struct SweepCell {
  Scheme scheme = Scheme::kActiveRsma;
  double x = 0.0;
  int trials = 0;
  int failures = 0;       // excluded from mean and std
  int not_converged = 0;  // reached max_outer; still counted in the mean
  double mean = 0.0;
  double stddev = 0.0;    // sample standard deviation, 0 for one run
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kPower;
  std::vector<double> points;
  std::vector<Scheme> schemes;
  int trials = 0;
  std::vector<SweepCell> cells;  // point-major, then scheme order
  std::vector<RunRecord> runs;   // cell order, then trial
  bool all_ok() const;  // every run ok with invariants intact
  const SweepCell& cell(double x, Scheme s) const;
};

// Runs every (point, scheme, trial) on a thread pool. Each run owns its
// channels and solver state and writes one preallocated slot, so the result
// does not depend on the thread count.
SweepResult run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& points,
                      const std::vector<Scheme>& schemes, int trials, int threads = 0);

void aggregate(const std::vector<RunRecord>& runs, SweepCell* cell);

}  // namespace risrsma
