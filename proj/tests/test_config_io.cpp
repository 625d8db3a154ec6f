// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include "risrsma/config_io.hpp"

namespace risrsma {
namespace {

TEST(ConfigIo, RoundTripPreservesEverything) {
  ExperimentConfig c;
  c.scenario.seed = 42;
  c.scenario.L = 16;
  c.scenario.R_min = 0.25;
  c.scenario.sigma_z2 = 3.3e-11;
  c.scenario.joint_refinement = false;
  c.sweep.elements = {4, 8};
  c.sweep.trials = 3;
  c.sweep.schemes = {Scheme::kActiveSdma};
  const std::string text = config_to_json(c);
  const ExperimentConfig back = config_from_json(text);
  EXPECT_EQ(config_to_json(back), text);
  EXPECT_EQ(back.scenario.seed, 42u);
  EXPECT_EQ(back.scenario.L, 16);
  EXPECT_EQ(back.scenario.sigma_z2, 3.3e-11);
  EXPECT_FALSE(back.scenario.joint_refinement);
  EXPECT_EQ(back.sweep.elements, (std::vector<int>{4, 8}));
  EXPECT_EQ(back.sweep.schemes, std::vector<Scheme>{Scheme::kActiveSdma});
}

TEST(ConfigIo, PartialConfigKeepsDefaults) {
  const ExperimentConfig c = config_from_json(R"({"system": {"L": 8}})");
  const ExperimentConfig d;
  EXPECT_EQ(c.scenario.L, 8);
  EXPECT_EQ(c.scenario.K, d.scenario.K);
  EXPECT_EQ(c.scenario.P_bs_max, d.scenario.P_bs_max);
  EXPECT_EQ(c.sweep.trials, d.sweep.trials);
  EXPECT_EQ(config_to_json(config_from_json("{}")), config_to_json(d));
}

TEST(ConfigIo, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(R"({"system": {"Lx": 8}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"extras": {}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"system": {"L": "eight"}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"system": {"L": 0}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"sweep": {"schemes": ["noma"]}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json("{not json"), std::invalid_argument);
}

TEST(ConfigIo, SaveAndLoad) {
  const auto path = std::filesystem::temp_directory_path() / "risrsma_cfg_test.json";
  ExperimentConfig c;
  c.scenario.K = 3;
  c.scenario.alpha_bu_list = {2.0, 3.0, 3.5};
  save_config(c, path.string());
  EXPECT_EQ(config_to_json(load_config(path.string())), config_to_json(c));
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), std::invalid_argument);
}

}  // namespace
}  // namespace risrsma
