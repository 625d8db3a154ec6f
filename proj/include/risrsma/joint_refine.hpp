// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "risrsma/rsma_rates.hpp"

// Joint quasi-Newton step on (w, psi). The block updates alone can stall
// where the RIS power constraint ties the beams to psi; this step moves both
// at once. Points are parametrized by the beams over sqrt(P_bs) and psi over
// its starting norm; the beams are always scaled to the BS budget, psi to
// the RIS budget (unit modulus in passive mode) and r_c re-allocated, so
// every trial point is feasible by construction.
namespace risrsma {

struct JointRefineOptions {
  bool common_stream = true;
  int max_iterations = 200;
  double fd_step = 1e-7;     // central differences, normalized coordinates
  double min_gain = 1e-10;   // stop once an accepted step gains less
};

struct JointRefineResult {
  TransmitDesign design;
  RisVector ris;
  int iterations = 0;        // accepted BFGS steps
  double sum_rate = 0.0;
  bool changed = false;      // false: the input point is returned as is
  std::string message;
};

// Sum rate of the retracted point, or -infinity when no r_c meets QoS.
double retracted_sum_rate(const ChannelSet& ch, const ScenarioConfig& cfg, bool common_stream,
                          const TransmitDesign& d, const RisVector& ris);

// Requires (d, ris) feasible. The result is either the input or a feasible
// point with a strictly larger sum rate.
JointRefineResult joint_refine(const ChannelSet& ch, const ScenarioConfig& cfg,
                               const TransmitDesign& d, const RisVector& ris,
                               const JointRefineOptions& opts = {});

}  // namespace risrsma
