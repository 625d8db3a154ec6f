// SPDX-License-Identifier: Apache-2.0

#include "risrsma/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace risrsma {

const char* to_string(SweepAxis a) { return a == SweepAxis::kPower ? "power" : "elements"; }

ScenarioConfig sweep_point_config(const ScenarioConfig& base, SweepAxis axis, double x) {
  ScenarioConfig c = base;
  if (axis == SweepAxis::kPower) {
    c.P_bs_max = 0.5 * dbw_to_watts(x);
    c.P_a_max = c.P_bs_max;
  } else {
    if (!(x >= 1.0) || x != std::floor(x))
      throw std::invalid_argument("element count must be a positive integer");
    c.L = static_cast<int>(x);
  }
  return c;
}

std::uint64_t trial_seed(const ScenarioConfig& base, int trial) {
  return base.seed + static_cast<std::uint64_t>(trial);
}

bool SweepResult::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.ok && r.invariants; });
}

const SweepCell& SweepResult::cell(double x, Scheme s) const {
  for (const auto& c : cells)
    if (c.x == x && c.scheme == s) return c;
  throw std::out_of_range("no sweep cell for that point and scheme");
}

void aggregate(const std::vector<RunRecord>& runs, SweepCell* cell) {
  cell->trials = static_cast<int>(runs.size());
  cell->failures = 0;
  cell->not_converged = 0;
  double sum = 0.0;
  int n = 0;
  for (const auto& r : runs) {
    if (!r.ok) {
      ++cell->failures;
      continue;
    }
    if (!r.converged) ++cell->not_converged;
    sum += r.sum_rate;
    ++n;
  }
  cell->mean = n > 0 ? sum / n : std::nan("");
  double ss = 0.0;
  for (const auto& r : runs)
    if (r.ok) ss += (r.sum_rate - cell->mean) * (r.sum_rate - cell->mean);
  cell->stddev = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
}

SweepResult run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& points,
                      const std::vector<Scheme>& schemes, int trials, int threads) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  SweepResult res;
  res.axis = axis;
  res.points = points;
  res.schemes = schemes;
  res.trials = trials;
  std::vector<ScenarioConfig> point_cfg;
  for (double x : points) {
    point_cfg.push_back(sweep_point_config(base, axis, x));
    validate(point_cfg.back());
  }

  for (size_t p = 0; p < points.size(); ++p)
    for (Scheme s : schemes)
      for (int t = 0; t < trials; ++t) {
        RunRecord r;
        r.scheme = s;
        r.x = points[p];
        r.trial = t;
        r.seed = trial_seed(base, t);
        res.runs.push_back(r);
      }

  const int jobs = static_cast<int>(res.runs.size());
  const int per_scheme = trials * static_cast<int>(schemes.size());
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int j = next++; j < jobs; j = next++) {
      RunRecord& rec = res.runs[j];
      try {
        const RunResult rr = run_algorithm1(point_cfg[j / per_scheme], rec.scheme, rec.seed);
        rec.ok = rr.ok;
        rec.converged = rr.converged;
        rec.invariants = invariants_hold(rr);
        rec.iterations = rr.iterations;
        rec.sum_rate = rr.sum_rate;
        rec.wall_time_s = rr.wall_time_s;
        rec.status = rr.status;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.status = std::string("exception: ") + e.what();
      }
    }
  };
  int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::clamp(nt, 1, std::max(1, jobs));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (size_t p = 0; p < points.size(); ++p)
    for (size_t s = 0; s < schemes.size(); ++s) {
      const auto first = res.runs.begin() + static_cast<long>((p * schemes.size() + s) * trials);
      SweepCell c;
      c.scheme = schemes[s];
      c.x = points[p];
      aggregate(std::vector<RunRecord>(first, first + trials), &c);
      res.cells.push_back(c);
    }
  return res;
}

}  // namespace risrsma
