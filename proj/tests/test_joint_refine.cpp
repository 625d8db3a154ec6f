// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "risrsma/algorithm.hpp"

namespace risrsma {
namespace {

struct Start {
  ScenarioConfig cfg;
  ChannelSet ch;
  TransmitDesign d;
  RisVector ris;
};

Start start_point(Scheme s, std::uint64_t seed) {
  ScenarioConfig base;
  Start st{scheme_config(base, s), {}, {}, {}};
  st.ch = generate_channels(st.cfg, seed);
  const RisMode mode = s == Scheme::kPassiveRsma ? RisMode::kPassive : RisMode::kActive;
  st.ris = initial_ris(st.ch, st.cfg, mode, seed);
  const InitResult init = init_point(st.ch, st.ris, st.cfg, {s != Scheme::kActiveSdma});
  st.d = init.design;
  return st;
}

TEST(JointRefine, FeasibleAndNoWorse) {
  for (Scheme s : all_schemes()) {
    for (std::uint64_t seed : {1u, 2u}) {
      const Start st = start_point(s, seed);
      const bool common = s != Scheme::kActiveSdma;
      const RateReport before = evaluate(st.ch, st.ris, st.d, st.cfg);
      ASSERT_TRUE(before.feasible);
      const JointRefineResult r = joint_refine(st.ch, st.cfg, st.d, st.ris, {common, 30});
      const RateReport after = evaluate(st.ch, r.ris, r.design, st.cfg);
      EXPECT_TRUE(after.feasible) << to_string(s);
      EXPECT_GE(after.sum_rate, before.sum_rate) << to_string(s);
      EXPECT_NEAR(after.sum_rate, r.sum_rate, 1e-9);
      if (!r.changed) EXPECT_EQ(after.sum_rate, before.sum_rate);
      if (s == Scheme::kPassiveRsma)
        for (const Complex z : r.ris.psi) EXPECT_NEAR(std::abs(z), 1.0, 1e-9);
      if (!common) EXPECT_EQ(r.design.w0.norm(), 0.0);
    }
  }
}

TEST(JointRefine, RetractionMatchesEvaluateAtBudget) {
  const Start st = start_point(Scheme::kActiveRsma, 3);
  const double v = retracted_sum_rate(st.ch, st.cfg, true, st.d, st.ris);
  EXPECT_GE(v, evaluate(st.ch, st.ris, st.d, st.cfg).sum_rate - 1e-9);
}

TEST(JointRefine, ImprovesStalledBlockPoint) {
  double best_gain = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ScenarioConfig c;
    c.joint_refinement = false;
    const RunResult bcd = run_algorithm1(c, Scheme::kActiveRsma, seed);
    ASSERT_TRUE(bcd.ok);
    const ChannelSet ch = generate_channels(c, seed);
    const JointRefineResult r = joint_refine(ch, c, bcd.design, bcd.ris);
    EXPECT_TRUE(evaluate(ch, r.ris, r.design, c).feasible);
    EXPECT_GE(r.sum_rate, bcd.sum_rate - 1e-9);
    if (r.changed) best_gain = std::max(best_gain, r.sum_rate - bcd.sum_rate);
  }
  EXPECT_GT(best_gain, 1e-4);
}

}  // namespace
}  // namespace risrsma
