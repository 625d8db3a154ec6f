// SPDX-License-Identifier: Apache-2.0

#include "risrsma/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risrsma {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

}  // namespace

std::string sweep_csv(const SweepResult* sweep, SweepAxis axis) {
  std::ostringstream os;
  os << (axis == SweepAxis::kPower ? "total_power_dbw" : "L")
     << ",scheme,trials,completed,failures,not_converged,mean_sum_rate,std_sum_rate\n";
  if (sweep == nullptr) return os.str();
  for (const auto& c : sweep->cells) {
    os << num(c.x) << "," << to_string(c.scheme) << "," << c.trials << ","
       << c.trials - c.failures << "," << c.failures << "," << c.not_converged << ","
       << num(c.mean) << "," << num(c.stddev) << "\n";
  }
  return os.str();
}

std::string convergence_csv(const std::vector<RunResult>& runs) {
  std::ostringstream os;
  os << "scheme,seed,iteration,sum_rate,feasible,max_violation,sca_iterations,ris_iterations,"
        "joint_iterations,status\n";
  for (const auto& r : runs)
    for (const auto& it : r.trace)
      os << to_string(r.scheme) << "," << r.seed << "," << it.iteration << "," << num(it.sum_rate)
         << "," << (it.feasible ? 1 : 0) << "," << num(it.max_violation) << ","
         << it.sca_iterations << "," << it.ris_iterations << "," << it.joint_iterations << ","
         << field(it.status) << "\n";
  return os.str();
}

std::string runs_csv(const ReportData& data) {
  std::ostringstream os;
  os << "axis,x,scheme,trial,seed,ok,converged,iterations,sum_rate,status\n";
  for (const auto* sw : {&data.power_sweep, &data.element_sweep}) {
    if (!sw->has_value()) continue;
    for (const auto& r : (*sw)->runs)
      os << to_string((*sw)->axis) << "," << num(r.x) << "," << to_string(r.scheme) << ","
         << r.trial << "," << r.seed << "," << (r.ok ? 1 : 0) << "," << (r.converged ? 1 : 0)
         << "," << r.iterations << "," << num(r.sum_rate) << "," << field(r.status) << "\n";
  }
  for (const auto& r : data.runs)
    os << "single,," << to_string(r.scheme) << ",0," << r.seed << "," << (r.ok ? 1 : 0) << ","
       << (r.converged ? 1 : 0) << "," << r.iterations << "," << num(r.sum_rate) << ","
       << field(r.status) << "\n";
  return os.str();
}

std::string final_rates_csv(const std::vector<RunResult>& runs, int K) {
  std::ostringstream os;
  os << "scheme,seed,ok,converged,iterations," << rate_report_csv_header(K) << "\n";
  for (const auto& r : runs) {
    if (r.final_report.R_p.size() != K) continue;
    os << to_string(r.scheme) << "," << r.seed << "," << (r.ok ? 1 : 0) << ","
       << (r.converged ? 1 : 0) << "," << r.iterations << "," << rate_report_csv_row(r.final_report)
       << "\n";
  }
  return os.str();
}

std::vector<std::string> emit_report(const ReportData& data, int K, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory '" + out_dir + "'");
  const fs::path dir(out_dir);
  const auto sweep_ptr = [](const std::optional<SweepResult>& s) { return s ? &*s : nullptr; };
  write_file(dir / kPowerSweepFile, sweep_csv(sweep_ptr(data.power_sweep), SweepAxis::kPower));
  write_file(dir / kElementSweepFile, sweep_csv(sweep_ptr(data.element_sweep), SweepAxis::kElements));
  write_file(dir / kConvergenceFile, convergence_csv(data.runs));
  write_file(dir / kRunsFile, runs_csv(data));
  write_file(dir / kFinalRatesFile, final_rates_csv(data.runs, K));
  return {kPowerSweepFile, kElementSweepFile, kConvergenceFile, kRunsFile, kFinalRatesFile};
}

}  // namespace risrsma
