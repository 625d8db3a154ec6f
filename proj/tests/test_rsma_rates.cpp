// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "direct_oracle.hpp"
#include "risrsma/rsma_rates.hpp"

namespace risrsma {
namespace {

using testing::Direct;

struct Fixture {
  ScenarioConfig cfg;
  ChannelSet ch;
  TransmitDesign d;
  CVec psi;
};

Fixture make(std::uint64_t seed) {
  Fixture f;
  f.ch = generate_channels(f.cfg, seed);
  std::mt19937_64 rng(seed + 77);
  testing::random_point(rng, f.ch, f.cfg, &f.d, &f.psi);
  return f;
}

TEST(Sinrs, MatchDirectEvaluation) {
  for (int s = 0; s < 20; ++s) {
    const Fixture f = make(s);
    const Direct dir{f.ch, f.psi};
    const Sinrs g = sinrs(f.ch, f.psi, f.d, f.cfg.sigma_z2, f.cfg.sigma_k2);
    for (int k = 0; k < f.ch.K(); ++k) {
      EXPECT_NEAR(g.gamma_p(k) / dir.gamma_p(k, f.d, f.cfg), 1.0, 1e-12);
      EXPECT_NEAR(g.gamma_c(k) / dir.gamma_c(k, f.d, f.cfg), 1.0, 1e-12);
      EXPECT_NEAR(ris_noise(f.ch, f.psi, k, f.cfg.sigma_z2) / dir.ris_noise(k, f.cfg.sigma_z2), 1.0,
                  1e-12);
    }
    EXPECT_NEAR(ris_power(f.ch, f.psi, f.d, f.cfg.sigma_z2) / dir.ris_power(f.d, f.cfg.sigma_z2),
                1.0, 1e-12);
  }
}

TEST(Sinrs, NoRisAndNoInterferenceIsSnr) {
  ScenarioConfig c;
  c.K = 1;
  const ChannelSet ch = generate_channels(c, 2);
  TransmitDesign d = TransmitDesign::zeros(1, c.N_T);
  d.w[0] = ch.g[0] / ch.g[0].norm() * std::sqrt(2.0);
  const Sinrs g = sinrs(ch, CVec::Zero(c.L), d, c.sigma_z2, c.sigma_k2);
  EXPECT_NEAR(g.gamma_p(0), 2.0 * ch.g[0].squaredNorm() / c.sigma_k2, 1e-6 * g.gamma_p(0));
  EXPECT_EQ(g.gamma_c(0), 0.0);
}

TEST(Evaluate, FeasibleDesignAndRates) {
  Fixture f = make(3);
  const Direct dir{f.ch, f.psi};
  // Shares that satisfy every constraint with room to spare.
  const double cap = std::log2(1.0 + std::min(dir.gamma_c(0, f.d, f.cfg), dir.gamma_c(1, f.d, f.cfg)));
  f.d.r_c = RVec::Constant(2, 0.25 * cap);
  const RateReport r = evaluate(f.ch, RisVector{f.psi, RisMode::kActive}, f.d, f.cfg);
  EXPECT_TRUE(r.feasible) << r.max_violation();
  double expect = f.d.r_c.sum();
  for (int k = 0; k < 2; ++k) expect += std::log2(1.0 + dir.gamma_p(k, f.d, f.cfg));
  EXPECT_NEAR(r.sum_rate, expect, 1e-10);
  EXPECT_NEAR(r.p_bs_used, f.d.power(), 1e-12);
  EXPECT_TRUE(r.violated().empty());
}

TEST(Evaluate, FlagsEachViolation) {
  Fixture f = make(4);
  const RisVector ris{f.psi, RisMode::kActive};
  TransmitDesign d = f.d;
  d.r_c = RVec::Constant(2, 100.0);
  auto names = evaluate(f.ch, ris, d, f.cfg).violated();
  EXPECT_NE(std::find(names.begin(), names.end(), "common_decodable[1]"), names.end());

  d = f.d;
  d.r_c = RVec::Constant(2, -0.1);
  names = evaluate(f.ch, ris, d, f.cfg).violated();
  EXPECT_NE(std::find(names.begin(), names.end(), "common_share_nonneg[2]"), names.end());

  d = f.d;
  d.w0 *= 10.0;
  names = evaluate(f.ch, ris, d, f.cfg).violated();
  EXPECT_NE(std::find(names.begin(), names.end(), "bs_power"), names.end());

  names = evaluate(f.ch, RisVector{f.psi * 10.0, RisMode::kActive}, f.d, f.cfg).violated();
  EXPECT_NE(std::find(names.begin(), names.end(), "ris_power"), names.end());

  ScenarioConfig c = f.cfg;
  c.R_min = 1000.0;
  names = evaluate(f.ch, ris, f.d, c).violated();
  EXPECT_NE(std::find(names.begin(), names.end(), "qos[1]"), names.end());

  names = evaluate(f.ch, RisVector{f.psi, RisMode::kPassive}, f.d, f.cfg).violated();
  EXPECT_NE(std::find(names.begin(), names.end(), "unit_modulus"), names.end());
}

TEST(Evaluate, ToleranceIsAbsolute) {
  Fixture f = make(5);
  ScenarioConfig c = f.cfg;
  c.P_bs_max = f.d.power() - 0.5 * kFeasibilityTol;
  EXPECT_TRUE(evaluate(f.ch, RisVector{f.psi, RisMode::kActive}, f.d, c).feasible);
  c.P_bs_max = f.d.power() - 2.0 * kFeasibilityTol;
  EXPECT_FALSE(evaluate(f.ch, RisVector{f.psi, RisMode::kActive}, f.d, c).feasible);
}

TEST(CommonRate, CapIsWeakestUser) {
  const Fixture f = make(6);
  const Direct dir{f.ch, f.psi};
  const double expect =
      std::log2(1.0 + std::min(dir.gamma_c(0, f.d, f.cfg), dir.gamma_c(1, f.d, f.cfg)));
  EXPECT_NEAR(common_rate_cap(f.ch, f.psi, f.d, f.cfg.sigma_z2, f.cfg.sigma_k2), expect, 1e-12);
}

TEST(CommonRate, AllocationCoversDeficitsAndUsesCap) {
  Sinrs s{RVec(3), RVec(3)};
  s.gamma_c << 3.0, 7.0, 5.0;       // cap = log2(4) = 2
  s.gamma_p << 0.0, 1.0, 15.0;      // R_p = 0, 1, 4
  const auto rc = allocate_common_rate(s, 1.5, 0.0);
  ASSERT_TRUE(rc.has_value());
  // deficits 1.5, 0.5, 0 leave 0 to share
  EXPECT_NEAR((*rc)(0), 1.5, 1e-15);
  EXPECT_NEAR((*rc)(1), 0.5, 1e-15);
  EXPECT_NEAR((*rc)(2), 0.0, 1e-15);
  const auto lo = allocate_common_rate(s, 0.5, 1e-9);
  ASSERT_TRUE(lo.has_value());
  EXPECT_NEAR(lo->sum(), 2.0 * (1.0 - 1e-9), 1e-14);
  EXPECT_GE((*lo)(0), 0.5 * (1.0 - 1e-9));
  EXPECT_FALSE(allocate_common_rate(s, 2.0, 0.0).has_value());
}

TEST(Csv, HeaderMatchesRow) {
  const Fixture f = make(7);
  const RateReport r = evaluate(f.ch, RisVector{f.psi, RisMode::kActive}, f.d, f.cfg);
  const std::string h = rate_report_csv_header(2);
  const std::string row = rate_report_csv_row(r);
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), std::count(row.begin(), row.end(), ','));
}

}  // namespace
}  // namespace risrsma
