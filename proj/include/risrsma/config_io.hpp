// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "risrsma/sweep.hpp"

// JSON configuration files. Layout (every key optional, defaults as in
// ScenarioConfig / SweepSettings; unknown keys are rejected):
//
//   { "seed": 1,
//     "system":    { "K", "N_T", "L" },
//     "geometry":  { "bs_pos": [x, y], "ris_pos", "user_center", "user_radius" },
//     "path_loss": { "L0_dB", "d0", "alpha_bu": [..], "alpha_br", "alpha_ru" },
//     "noise":     { "sigma_z2", "sigma_k2" },                  // watts
//     "power":     { "P_bs_max", "P_a_max" },                   // watts
//     "qos":       { "R_min" },
//     "algorithm": { "eps_outer", "eps_inner", "max_outer", "max_inner",
//                    "max_ris_inner", "solver_tol", "spectral_power_surrogate",
//                    "joint_refinement", "max_joint_inner" },
//     "sweep":     { "power_dbw": [..], "elements": [..], "trials", "threads",
//                    "schemes": ["active-rsma", ..] } }
namespace risrsma {

struct ExperimentConfig {
  ScenarioConfig scenario;
  SweepSettings sweep;
};

// Throws std::invalid_argument on malformed input, unknown keys or a config
// that fails validate().
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace risrsma
