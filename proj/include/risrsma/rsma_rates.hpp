// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "risrsma/channel_model.hpp"

namespace risrsma {

// Absolute tolerance shared by every feasibility check (bps/Hz and watts).
inline constexpr double kFeasibilityTol = 1e-6;

struct TransmitDesign {
  CVec w0;               // common beam
  std::vector<CVec> w;   // private beams w_1..w_K
  RVec r_c;              // common-rate shares, bps/Hz

  static TransmitDesign zeros(int K, int N_T);
  int K() const { return static_cast<int>(w.size()); }
  double power() const;  // sum_{k=0..K} ||w_k||^2
};

enum class RisMode { kActive, kPassive };

struct RisVector {
  CVec psi;
  RisMode mode = RisMode::kActive;
};

struct Sinrs {
  RVec gamma_c;
  RVec gamma_p;
};

struct ConstraintCheck {
  std::string name;   // e.g. "qos[1]"
  double residual;    // signed; > 0 means violated by that amount
  bool ok;
};

struct RateReport {
  RVec gamma_c, gamma_p;
  RVec R_c, R_p;
  double sum_rate = 0.0;
  double p_bs_used = 0.0;
  double p_a_used = 0.0;
  bool feasible = false;
  std::vector<ConstraintCheck> checks;

  double max_violation() const;
  std::vector<std::string> violated() const;
};

// Dynamic-noise power ||f_k^H diag(psi)||^2 sigma_z^2.
double ris_noise(const ChannelSet& ch, const CVec& psi, int k, double sigma_z2);

// Left side of the RIS power constraint for the given beams.
double ris_power(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d, double sigma_z2);

Sinrs sinrs(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d, double sigma_z2,
            double sigma_k2);

// Full evaluation of P0 at (psi, design). In passive mode the RIS power
// constraint is replaced by a unit-modulus check.
RateReport evaluate(const ChannelSet& ch, const RisVector& ris, const TransmitDesign& d,
                    const ScenarioConfig& cfg, double tol = kFeasibilityTol);

// min_k log2(1 + gamma_c,k).
double common_rate_cap(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
                       double sigma_z2, double sigma_k2);

// Common-rate shares that maximize sum r_c for fixed beams: each user's QoS
// deficit max(0, R_min - R_p,k) plus an equal share of the remaining common
// capacity, all scaled by (1 - margin). Empty when the deficits exceed the
// capacity.
std::optional<RVec> allocate_common_rate(const Sinrs& s, double R_min, double margin = 1e-9);

std::string rate_report_csv_header(int K);
std::string rate_report_csv_row(const RateReport& r);

}  // namespace risrsma
