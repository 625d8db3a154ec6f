// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "risrsma/config_io.hpp"

// CSV and manifest output. Column orders are stable; numbers are written
// with 17 significant digits and no timing data, so a rerun with the same
// inputs gives identical files.
//
//   fig2_power_sweep.csv    total_power_dbw,scheme,trials,completed,failures,
//                           not_converged,mean_sum_rate,std_sum_rate
//   fig3_element_sweep.csv  L,scheme,<same as above>
//   fig4_convergence.csv    scheme,seed,iteration,sum_rate,feasible,
//                           max_violation,sca_iterations,ris_iterations,
//                           joint_iterations,status
//   runs.csv                axis,x,scheme,trial,seed,ok,converged,iterations,
//                           sum_rate,status
//   final_rates.csv         scheme,seed,ok,converged,iterations,<RateReport>
namespace risrsma {

struct ReportData {
  std::optional<SweepResult> power_sweep;
  std::optional<SweepResult> element_sweep;
  std::vector<RunResult> runs;  // single runs; their traces fill fig4
};

std::string sweep_csv(const SweepResult* sweep, SweepAxis axis);
std::string convergence_csv(const std::vector<RunResult>& runs);
std::string runs_csv(const ReportData& data);
std::string final_rates_csv(const std::vector<RunResult>& runs, int K);

inline constexpr const char* kPowerSweepFile = "fig2_power_sweep.csv";
inline constexpr const char* kElementSweepFile = "fig3_element_sweep.csv";
inline constexpr const char* kConvergenceFile = "fig4_convergence.csv";
inline constexpr const char* kRunsFile = "runs.csv";
inline constexpr const char* kFinalRatesFile = "final_rates.csv";
inline constexpr const char* kManifestFile = "manifest.json";

// Writes all five CSVs (headers only where the data is absent), creating
// out_dir if needed. Returns the file names written. Throws
// std::runtime_error when the directory or a file cannot be written.
std::vector<std::string> emit_report(const ReportData& data, int K, const std::string& out_dir);

}  // namespace risrsma
