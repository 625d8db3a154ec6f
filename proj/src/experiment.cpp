// SPDX-License-Identifier: Apache-2.0

#include "risrsma/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace risrsma {

using nlohmann::json;

namespace {

constexpr const char* kManifestFormat = "risrsma-manifest/1";
constexpr const char* kVersion = "0.1.0";

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::kRun: return "run";
    case Command::kConvergence: return "convergence";
    case Command::kSweepPower: return "sweep-power";
    case Command::kSweepElements: return "sweep-elements";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::kRun, Command::kConvergence, Command::kSweepPower,
                    Command::kSweepElements})
    if (name == to_string(c)) return c;
  throw std::invalid_argument("unknown command '" + name + "'");
}

ExperimentOutput execute(const ExperimentRequest& req) {
  const ScenarioConfig& base = req.config.scenario;
  const SweepSettings& sw = req.config.sweep;
  validate(base);
  ExperimentOutput out;
  switch (req.command) {
    case Command::kRun:
    case Command::kConvergence:
      for (Scheme s : sw.schemes) {
        RunResult r = run_algorithm1(base, s, base.seed);
        ++out.total_runs;
        if (!invariants_hold(r)) ++out.failed_runs;
        out.data.runs.push_back(std::move(r));
      }
      break;
    case Command::kSweepPower:
    case Command::kSweepElements: {
      const bool power = req.command == Command::kSweepPower;
      std::vector<double> pts;
      if (power) {
        pts = sw.power_dbw;
      } else {
        for (int L : sw.elements) pts.push_back(L);
      }
      SweepResult res = run_sweep(base, power ? SweepAxis::kPower : SweepAxis::kElements, pts,
                                  sw.schemes, sw.trials, sw.threads);
      for (const auto& r : res.runs) {
        ++out.total_runs;
        if (!r.ok || !r.invariants) ++out.failed_runs;
      }
      (power ? out.data.power_sweep : out.data.element_sweep) = std::move(res);
      break;
    }
  }
  return out;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string manifest_json(const ExperimentRequest& req, const ExperimentOutput& out,
                          const std::string& out_dir) {
  json m;
  m["format"] = kManifestFormat;
  m["command"] = to_string(req.command);
  m["config"] = json::parse(config_to_json(req.config));
  json seeds = json::array();
  const ScenarioConfig& base = req.config.scenario;
  if (req.command == Command::kRun || req.command == Command::kConvergence) {
    seeds.push_back(base.seed);
  } else {
    for (int t = 0; t < req.config.sweep.trials; ++t) seeds.push_back(trial_seed(base, t));
  }
  m["seeds"] = seeds;
  m["versions"] = {{"risrsma", kVersion}, {"compiler", __VERSION__}, {"eigen", eigen_version()}};
  m["runs"] = {{"total", out.total_runs}, {"failed", out.failed_runs}};
  json files = json::object();
  for (const auto& f : out.files)
    files[f] = file_digest((std::filesystem::path(out_dir) / f).string());
  m["outputs"] = files;
  return m.dump(2) + "\n";
}

ExperimentRequest request_from_manifest(const std::string& text) {
  json m;
  try {
    m = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!m.is_object() || m.value("format", "") != kManifestFormat)
    throw std::invalid_argument("not a risrsma manifest");
  if (!m.contains("command") || !m.contains("config"))
    throw std::invalid_argument("manifest lacks command or config");
  ExperimentRequest req;
  req.command = command_from_string(m["command"].get<std::string>());
  req.config = config_from_json(m["config"].dump());
  return req;
}

ExperimentOutput run_experiment(const ExperimentRequest& req, const std::string& out_dir) {
  ExperimentOutput out = execute(req);
  out.files = emit_report(out.data, req.config.scenario.K, out_dir);
  const std::filesystem::path mp = std::filesystem::path(out_dir) / kManifestFile;
  std::ofstream mf(mp, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write '" + mp.string() + "'");
  mf << manifest_json(req, out, out_dir);
  return out;
}

ReplayResult replay(const std::string& manifest_path, const std::string& out_dir) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open manifest '" + manifest_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const json m = json::parse(ss.str(), nullptr, false);
  const ExperimentRequest req = request_from_manifest(ss.str());
  ReplayResult res;
  res.output = run_experiment(req, out_dir);
  const json recorded = m.value("outputs", json::object());
  for (const auto& f : res.output.files) {
    const std::string now = file_digest((std::filesystem::path(out_dir) / f).string());
    if (!recorded.contains(f) || recorded[f].get<std::string>() != now) res.mismatched.push_back(f);
  }
  return res;
}

}  // namespace risrsma
