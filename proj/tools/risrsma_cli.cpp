// SPDX-License-Identifier: Apache-2.0

// Command-line front end: single runs, convergence traces, the power and
// element sweeps, oracle validation and manifest replay.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risrsma/experiment.hpp"
#include "risrsma/self_check.hpp"

namespace {

using namespace risrsma;

struct CommonFlags {
  std::string config;
  std::string out = "results";
  std::vector<std::string> schemes;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  int threads = -1;
};

void add_common(CLI::App* sub, CommonFlags* f, bool sweep) {
  sub->add_option("--config", f->config, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", f->out, "output directory")->capture_default_str();
  sub->add_option("--scheme", f->schemes, "active-rsma, passive-rsma, active-sdma or all (repeatable)");
  sub->add_option_function<std::uint64_t>(
      "--seed", [f](std::uint64_t s) { f->seed = s, f->seed_set = true; },
      sweep ? "base seed; trial t uses seed + t" : "channel seed");
  if (sweep) {
    sub->add_option("--trials", f->trials, "trials per sweep point")->check(CLI::PositiveNumber);
    sub->add_option("--threads", f->threads, "worker threads, 0 for one per core")
        ->check(CLI::NonNegativeNumber);
  }
}

ExperimentRequest make_request(Command cmd, const CommonFlags& f) {
  ExperimentRequest req;
  req.command = cmd;
  if (!f.config.empty()) req.config = load_config(f.config);
  if (f.seed_set) req.config.scenario.seed = f.seed;
  if (f.trials > 0) req.config.sweep.trials = f.trials;
  if (f.threads >= 0) req.config.sweep.threads = f.threads;
  if (!f.schemes.empty()) {
    req.config.sweep.schemes.clear();
    for (const auto& s : f.schemes) {
      if (s == "all") {
        req.config.sweep.schemes = all_schemes();
        break;
      }
      req.config.sweep.schemes.push_back(scheme_from_string(s));
    }
  }
  return req;
}

void print_runs(const ExperimentOutput& out) {
  for (const auto& r : out.data.runs)
    std::printf("%-13s seed %llu  sum-rate %.6f bps/Hz  iterations %d  %s  (%.2f s)\n",
                to_string(r.scheme), static_cast<unsigned long long>(r.seed), r.sum_rate,
                r.iterations, r.status.c_str(), r.wall_time_s);
}

void print_sweep(const SweepResult& s) {
  std::printf("%-10s %-13s %10s %10s %6s %6s\n", s.axis == SweepAxis::kPower ? "P [dBW]" : "L",
              "scheme", "mean", "std", "fail", "nconv");
  for (const auto& c : s.cells)
    std::printf("%-10g %-13s %10.4f %10.4f %6d %6d\n", c.x, to_string(c.scheme), c.mean, c.stddev,
                c.failures, c.not_converged);
}

int report(const ExperimentOutput& out, const std::string& dir) {
  print_runs(out);
  if (out.data.power_sweep) print_sweep(*out.data.power_sweep);
  if (out.data.element_sweep) print_sweep(*out.data.element_sweep);
  std::printf("wrote %zu files and %s to %s; %d/%d runs passed their rechecks\n", out.files.size(),
              kManifestFile, dir.c_str(), out.total_runs - out.failed_runs, out.total_runs);
  return out.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-rate maximization for active-RIS-aided RSMA downlinks"};
  app.require_subcommand(1);

  struct Sub {
    Command cmd;
    const char* name;
    const char* help;
    bool sweep;
    CommonFlags flags;
    CLI::App* app = nullptr;
  };
  std::vector<Sub> subs{
      {Command::kRun, "run", "optimize one channel draw per scheme", false, {}},
      {Command::kConvergence, "convergence", "per-iteration sum-rate trace per scheme", false, {}},
      {Command::kSweepPower, "sweep-power", "mean sum-rate versus total power", true, {}},
      {Command::kSweepElements, "sweep-elements", "mean sum-rate versus RIS elements", true, {}},
  };
  for (auto& s : subs) {
    s.app = app.add_subcommand(s.name, s.help);
    add_common(s.app, &s.flags, s.sweep);
  }

  int instances = 100;
  std::uint64_t check_seed = 1;
  CLI::App* val = app.add_subcommand("validate", "run the oracle suites");
  val->add_option("--instances", instances, "random instances per suite")->check(CLI::PositiveNumber);
  val->add_option("--seed", check_seed, "base seed");

  std::string manifest, replay_out = "replay";
  CLI::App* rep = app.add_subcommand("replay", "rerun an experiment from its manifest");
  rep->add_option("--manifest", manifest, "manifest.json of an earlier run")
      ->required()
      ->check(CLI::ExistingFile);
  rep->add_option("--out", replay_out, "output directory")->capture_default_str();

  std::string config_out;
  CLI::App* cfg = app.add_subcommand("config", "write the default configuration");
  cfg->add_option("--out", config_out, "file to write; standard output if absent");

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& s : subs) {
      if (!s.app->parsed()) continue;
      const ExperimentRequest req = make_request(s.cmd, s.flags);
      return report(run_experiment(req, s.flags.out), s.flags.out);
    }
    if (val->parsed()) {
      bool ok = true;
      for (const auto& c : run_self_checks(instances, check_seed)) {
        std::printf("%s\n", format_outcome(c).c_str());
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
    if (rep->parsed()) {
      const ReplayResult rr = replay(manifest, replay_out);
      const int code = report(rr.output, replay_out);
      if (rr.mismatched.empty()) {
        std::printf("all outputs identical to the manifest\n");
        return code;
      }
      for (const auto& f : rr.mismatched) std::printf("differs from manifest: %s\n", f.c_str());
      return 1;
    }
    if (cfg->parsed()) {
      if (config_out.empty()) {
        std::cout << config_to_json(ExperimentConfig{}) << "\n";
      } else {
        save_config(ExperimentConfig{}, config_out);
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
