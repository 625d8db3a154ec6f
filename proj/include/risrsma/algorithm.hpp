// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risrsma/beamforming_sca.hpp"
#include "risrsma/joint_refine.hpp"
#include "risrsma/ris_fp_qcqp.hpp"

namespace risrsma {

enum class Scheme { kActiveRsma, kPassiveRsma, kActiveSdma };

const char* to_string(Scheme s);
// Accepts "active-rsma", "passive-rsma", "active-sdma".
Scheme scheme_from_string(const std::string& name);
std::vector<Scheme> all_schemes();

// Budget convention per scheme: the passive system puts the whole budget
// P_bs_max + P_a_max at the BS.
ScenarioConfig scheme_config(const ScenarioConfig& cfg, Scheme s);

// Random phases from a generator derived from `seed`. Active amplitudes are
// chosen so the RIS uses at most half its budget with full BS power.
RisVector initial_ris(const ChannelSet& ch, const ScenarioConfig& cfg, RisMode mode,
                      std::uint64_t seed);

struct OuterIterate {
  int iteration = 0;
  double sum_rate = 0.0;
  bool feasible = false;
  double max_violation = 0.0;
  int sca_iterations = 0;
  int ris_iterations = 0;
  int joint_iterations = 0;  // accepted joint steps, 0 when none was kept
  std::string status;
};

struct RunResult {
  Scheme scheme = Scheme::kActiveRsma;
  std::uint64_t seed = 0;
  bool ok = false;         // started feasible and every iterate re-validated
  bool converged = false;  // |delta R| <= eps_outer before max_outer
  std::string status;
  double initial_sum_rate = 0.0;
  double sum_rate = 0.0;
  int iterations = 0;
  std::vector<OuterIterate> trace;
  RateReport final_report;
  TransmitDesign design;
  RisVector ris;
  double wall_time_s = 0.0;
};

// Channels drawn from `seed`; `cfg` holds the unsplit budgets.
RunResult run_algorithm1(const ScenarioConfig& cfg, Scheme scheme, std::uint64_t seed);

// Same loop on given channels and starting RIS vector. `cfg` must already be
// the scheme's configuration.
RunResult run_algorithm1(const ChannelSet& ch, const ScenarioConfig& cfg, Scheme scheme,
                         const RisVector& ris0);

// Run-level invariants: started feasible, final design re-validates, and the
// outer trace (from the initial point) never drops by more than `slack`.
bool invariants_hold(const RunResult& r, double slack = 1e-6);

}  // namespace risrsma
