// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "risrsma/report.hpp"

// One CLI-level experiment: the command, the full configuration, and the
// files it produced. The manifest stores enough to rerun it exactly.
namespace risrsma {

enum class Command { kRun, kConvergence, kSweepPower, kSweepElements };

const char* to_string(Command c);
Command command_from_string(const std::string& name);

// Seeds: run and convergence use scenario.seed for every scheme in
// sweep.schemes; sweeps use scenario.seed + trial.
struct ExperimentRequest {
  Command command = Command::kRun;
  ExperimentConfig config;
};

struct ExperimentOutput {
  ReportData data;
  int total_runs = 0;
  int failed_runs = 0;  // not ok, or an invariant recheck failed
  std::vector<std::string> files;
  bool all_ok() const { return failed_runs == 0; }
};

ExperimentOutput execute(const ExperimentRequest& req);

// execute() plus emit_report() and manifest.json in out_dir.
ExperimentOutput run_experiment(const ExperimentRequest& req, const std::string& out_dir);

std::string manifest_json(const ExperimentRequest& req, const ExperimentOutput& out,
                          const std::string& out_dir);
// Throws std::invalid_argument on a malformed manifest.
ExperimentRequest request_from_manifest(const std::string& text);

// 64-bit FNV-1a of a file's bytes, as 16 hex digits; recorded per output in
// the manifest.
std::string file_digest(const std::string& path);

struct ReplayResult {
  ExperimentOutput output;
  std::vector<std::string> mismatched;  // outputs whose digest differs from the manifest
};

// Reruns the experiment in `manifest_path` into out_dir and compares digests.
ReplayResult replay(const std::string& manifest_path, const std::string& out_dir);

}  // namespace risrsma
