// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "risrsma/algorithm.hpp"

namespace risrsma {
namespace {

TEST(Schemes, NamesRoundTrip) {
  for (Scheme s : all_schemes()) EXPECT_EQ(scheme_from_string(to_string(s)), s);
  EXPECT_THROW(scheme_from_string("rsma"), std::invalid_argument);
}

TEST(Schemes, PassiveGetsCombinedBudget) {
  ScenarioConfig c;
  EXPECT_DOUBLE_EQ(scheme_config(c, Scheme::kPassiveRsma).P_bs_max, c.P_bs_max + c.P_a_max);
  EXPECT_DOUBLE_EQ(scheme_config(c, Scheme::kActiveRsma).P_bs_max, c.P_bs_max);
}

TEST(InitialRis, ActiveUsesAtMostHalfBudget) {
  ScenarioConfig c;
  const ChannelSet ch = generate_channels(c, 4);
  const RisVector r = initial_ris(ch, c, RisMode::kActive, 4);
  TransmitDesign d = TransmitDesign::zeros(c.K, c.N_T);
  d.w[0] = CVec::Zero(c.N_T);
  Eigen::JacobiSVD<CMat> svd(ch.G, Eigen::ComputeThinV);
  d.w[0] = std::sqrt(c.P_bs_max) * svd.matrixV().col(0);
  EXPECT_LE(ris_power(ch, r.psi, d, c.sigma_z2), 0.5 * c.P_a_max * (1.0 + 1e-9));
  const RisVector p = initial_ris(ch, c, RisMode::kPassive, 4);
  for (const Complex z : p.psi) EXPECT_NEAR(std::abs(z), 1.0, 1e-12);
}

TEST(Algorithm, LooseToleranceStopsAfterOneIteration) {
  ScenarioConfig c;
  c.eps_outer = 1e6;
  const RunResult r = run_algorithm1(c, Scheme::kActiveRsma, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Algorithm, InvariantsHoldForEveryScheme) {
  for (Scheme s : all_schemes()) {
    ScenarioConfig c;
    c.max_outer = 8;
    const RunResult r = run_algorithm1(c, s, 2);
    EXPECT_TRUE(invariants_hold(r)) << to_string(s) << ": " << r.status;
    EXPECT_GE(r.sum_rate, r.initial_sum_rate);
    EXPECT_EQ(r.sum_rate, r.trace.back().sum_rate);
  }
}

TEST(Algorithm, SdmaIsNoBetterThanRsma) {
  ScenarioConfig c;
  c.max_outer = 8;
  const RunResult rs = run_algorithm1(c, Scheme::kActiveRsma, 5);
  const RunResult sd = run_algorithm1(c, Scheme::kActiveSdma, 5);
  EXPECT_LE(sd.sum_rate, rs.sum_rate + 1e-3);
  EXPECT_EQ(sd.design.w0.norm(), 0.0);
}

TEST(Algorithm, Deterministic) {
  ScenarioConfig c;
  c.max_outer = 3;
  const RunResult a = run_algorithm1(c, Scheme::kActiveRsma, 7);
  const RunResult b = run_algorithm1(c, Scheme::kActiveRsma, 7);
  EXPECT_EQ(a.sum_rate, b.sum_rate);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ((a.ris.psi - b.ris.psi).norm(), 0.0);
}

TEST(Algorithm, UnreachableQosReportsInfeasibleStart) {
  ScenarioConfig c;
  c.R_min = 60.0;
  const RunResult r = run_algorithm1(c, Scheme::kActiveRsma, 1);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_NE(r.status.find("infeasible start"), std::string::npos);
  EXPECT_FALSE(invariants_hold(r));
}

TEST(Invariants, DetectDecrease) {
  RunResult r;
  r.ok = true;
  r.final_report.feasible = true;
  r.initial_sum_rate = 1.0;
  r.trace.resize(2);
  r.trace[0].feasible = r.trace[1].feasible = true;
  r.trace[0].sum_rate = 2.0;
  r.trace[1].sum_rate = 1.5;
  EXPECT_FALSE(invariants_hold(r));
  r.trace[1].sum_rate = 2.0 - 1e-7;
  EXPECT_TRUE(invariants_hold(r));
}

}  // namespace
}  // namespace risrsma
