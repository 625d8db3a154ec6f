// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "risrsma/types.hpp"

namespace risrsma {

// Physical scenario plus the algorithm knobs that travel with it.
struct ScenarioConfig {
  int K = 2;
  int N_T = 4;
  int L = 16;

  Point2 bs_pos{0.0, 0.0};
  Point2 ris_pos{40.0, 30.0};
  Point2 user_center{80.0, 0.0};
  double user_radius = 5.0;

  double L0_dB = -30.0;
  double d0 = 1.0;
  // BS->user exponents; users beyond the list reuse its last entry.
  std::vector<double> alpha_bu_list{2.0, 3.0};
  double alpha_br = 3.0;
  double alpha_ru = 3.5;

  double sigma_z2 = 1e-11;  // -80 dBm
  double sigma_k2 = 1e-11;

  double P_bs_max = 15.811388300841898;  // 15 dBW split equally
  double P_a_max = 15.811388300841898;
  double R_min = 0.1;

  double eps_outer = 1e-5;
  double eps_inner = 1e-5;
  int max_outer = 100;
  int max_inner = 30;
  // RIS inner iterations per outer iteration.
  int max_ris_inner = 5;
  double solver_tol = 1e-6;
  // Replace the exact RIS power constraint in the beamforming step by the
  // spectral-norm bound ||diag(psi) G||^2 ||w||^2.
  bool spectral_power_surrogate = false;
  // After the two block updates, a joint quasi-Newton step on (w, psi) of at
  // most max_joint_inner iterations; see joint_refine.hpp.
  bool joint_refinement = true;
  int max_joint_inner = 200;

  std::uint64_t seed = 1;

  double alpha_bu(int k) const;
};

// Throws std::invalid_argument on an inconsistent configuration.
void validate(const ScenarioConfig& cfg);

double db_to_linear(double db);
double linear_to_db(double lin);
double dbm_to_watts(double dbm);
double dbw_to_watts(double dbw);

// L0 (d/d0)^-alpha as a linear power gain. Throws std::domain_error for
// non-positive distances.
double path_loss_linear(double d, double alpha, double L0_dB, double d0);

std::vector<Point2> sample_user_positions(const ScenarioConfig& cfg, std::mt19937_64& rng);

struct ChannelSet {
  std::vector<CVec> g;  // BS -> user k, length N_T
  CMat G;               // BS -> RIS, L x N_T
  std::vector<CVec> f;  // RIS -> user k, length L
  std::vector<Point2> user_pos;

  int K() const { return static_cast<int>(g.size()); }
  int N_T() const { return static_cast<int>(G.cols()); }
  int L() const { return static_cast<int>(G.rows()); }
};

// Draw order from a mt19937_64 seeded with `seed`: user positions, g_1..g_K,
// G (column-major), f_1..f_K. Each complex entry takes two normal draws.
ChannelSet generate_channels(const ScenarioConfig& cfg, std::uint64_t seed);

// h_k with h_k^H = g_k^H + f_k^H diag(psi) G.
CVec equivalent_channel(const ChannelSet& ch, const CVec& psi, int k);

}  // namespace risrsma
