// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "direct_oracle.hpp"
#include "risrsma/algorithm.hpp"

namespace risrsma {
namespace {

TEST(Bounds, TaylorSqrtIsTightAndAbove) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lu(-8.0, 8.0);
  for (int i = 0; i < 2000; ++i) {
    const double b0 = std::exp(lu(rng)), x0 = std::exp(lu(rng));
    const double b = std::exp(lu(rng)), x = std::exp(lu(rng));
    EXPECT_NEAR(taylor_sqrt_bound(b0, x0, b0, x0), std::sqrt(b0 * x0), 1e-12 * std::sqrt(b0 * x0));
    EXPECT_GE(taylor_sqrt_bound(b, x, b0, x0), std::sqrt(b * x) * (1.0 - 1e-13));
  }
}

TEST(Bounds, DcProductIsTightAndAbove) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lu(-6.0, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double l0 = std::exp(lu(rng)), k0 = std::exp(lu(rng));
    const double l = std::exp(lu(rng)), k = std::exp(lu(rng));
    EXPECT_NEAR(dc_product_bound(l0, k0, l0, k0), l0 * k0, 1e-12 * l0 * k0);
    EXPECT_GE(dc_product_bound(l, k, l0, k0), l * k * (1.0 - 1e-13));
  }
}

TEST(Bounds, PowerMinorantIsTightAndBelow) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 2000; ++i) {
    const Complex a0(nd(rng), nd(rng)), a(nd(rng), nd(rng));
    EXPECT_NEAR(dc_power_minorant(a0, a0), std::norm(a0), 1e-12 * std::norm(a0));
    EXPECT_LE(dc_power_minorant(a, a0), std::norm(a) + 1e-13);
  }
}

TEST(Auxiliaries, TightValuesMatchSinrs) {
  ScenarioConfig c;
  const ChannelSet ch = generate_channels(c, 8);
  std::mt19937_64 rng(8);
  TransmitDesign d;
  CVec psi;
  testing::random_point(rng, ch, c, &d, &psi);
  const testing::Direct dir{ch, psi};
  const ScaAuxiliaries a = tight_auxiliaries(ch, psi, d, c);
  for (int k = 0; k < c.K; ++k) {
    EXPECT_NEAR(a.xi(k) / dir.gamma_p(k, d, c), 1.0, 1e-12);
    EXPECT_NEAR(a.kappa(k) / dir.gamma_c(k, d, c), 1.0, 1e-12);
    const double nk = dir.ris_noise(k, c.sigma_z2) + c.sigma_k2;
    double total = nk;
    for (int j = 0; j < c.K; ++j) total += std::norm(dir.hw(k, d.w[j]));
    EXPECT_NEAR(a.lambda(k) / (total / nk), 1.0, 1e-12);
  }
}

// Every constraint of the subproblem holds at its expansion point.
TEST(Subproblem, ExpansionPointIsFeasible) {
  for (bool common : {true, false}) {
    ScenarioConfig c;
    const ChannelSet ch = generate_channels(c, 11);
    const RisVector ris = initial_ris(ch, c, RisMode::kActive, 11);
    const ScaOptions so{common};
    const InitResult init = init_point(ch, ris, c, so);
    ASSERT_TRUE(init.feasible) << init.message;
    const ScaSubproblem sub =
        build_subproblem(ch, ris, init.design, tight_auxiliaries(ch, ris.psi, init.design, c), c, so);
    ASSERT_NO_THROW(sub.program.validate());
    for (const auto& con : sub.program.constraints) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            double r = 0.0;
            if constexpr (std::is_same_v<T, solver::LinearConstraint>) {
              r = v.a.dot(sub.x0) - v.b;
              if (v.sense == solver::Sense::kEqual) r = std::abs(r);
            } else if constexpr (std::is_same_v<T, solver::QuadraticConstraint>) {
              r = sub.x0.dot(v.P * sub.x0) + v.q.dot(sub.x0) + v.r;
            } else if constexpr (std::is_same_v<T, solver::SecondOrderConeConstraint>) {
              r = (v.A * sub.x0 + v.b).norm() - v.c.dot(sub.x0) - v.d;
            } else if constexpr (std::is_same_v<T, solver::ExpConstraint>) {
              r = std::exp2(v.a.dot(sub.x0) + v.b) - v.c.dot(sub.x0) - v.d;
            } else {
              r = v.e.dot(sub.x0) + v.f - std::log2(1.0 + v.a.dot(sub.x0) + v.b);
            }
            EXPECT_LE(r, 1e-9) << v.name;
          },
          con);
    }
    const TransmitDesign back = extract_design(sub, sub.x0);
    EXPECT_NEAR(back.power(), init.design.power(), 1e-9 * c.P_bs_max);
  }
}

TEST(Sca, SingleUserReachesMrt) {
  for (int s = 0; s < 5; ++s) {
    ScenarioConfig c;
    c.K = 1;
    const ChannelSet ch = generate_channels(c, 20 + s);
    const RisVector ris{CVec::Zero(c.L), RisMode::kActive};
    const ScaOptions so{false};
    const InitResult init = init_point(ch, ris, c, so);
    ASSERT_TRUE(init.feasible);
    const ScaResult r = sca_solve(ch, ris, init.design, c, so);
    const RateReport rep = evaluate(ch, ris, r.design, c);
    EXPECT_TRUE(rep.feasible);
    EXPECT_NEAR(rep.sum_rate, std::log2(1.0 + c.P_bs_max * ch.g[0].squaredNorm() / c.sigma_k2), 1e-3);
  }
}

TEST(Sca, MonotoneAndFeasible) {
  for (bool common : {true, false}) {
    for (int s = 0; s < 4; ++s) {
      ScenarioConfig c;
      const ChannelSet ch = generate_channels(c, 30 + s);
      const RisVector ris = initial_ris(ch, c, RisMode::kActive, 30 + s);
      const ScaOptions so{common};
      const InitResult init = init_point(ch, ris, c, so);
      ASSERT_TRUE(init.feasible);
      const ScaResult r = sca_solve(ch, ris, init.design, c, so);
      const RateReport start = evaluate(ch, ris, init.design, c);
      const RateReport end = evaluate(ch, ris, r.design, c);
      EXPECT_TRUE(end.feasible);
      EXPECT_GE(end.sum_rate, start.sum_rate - 1e-9);
      double prev = start.sum_rate;
      for (const auto& row : r.trace) {
        EXPECT_GE(row.true_objective, prev - 1e-9);
        prev = row.true_objective;
      }
      if (!common) {
        EXPECT_EQ(r.design.w0.norm(), 0.0);
        EXPECT_EQ(r.design.r_c.norm(), 0.0);
      }
    }
  }
}

TEST(Sca, SpectralSurrogateStaysFeasible) {
  ScenarioConfig c;
  c.spectral_power_surrogate = true;
  const ChannelSet ch = generate_channels(c, 41);
  const RisVector ris = initial_ris(ch, c, RisMode::kActive, 41);
  const InitResult init = init_point(ch, ris, c);
  ASSERT_TRUE(init.feasible);
  const ScaResult r = sca_solve(ch, ris, init.design, c);
  EXPECT_TRUE(evaluate(ch, ris, r.design, c).feasible);
}

TEST(Init, ReportsUnreachableQos) {
  ScenarioConfig c;
  c.R_min = 60.0;
  const ChannelSet ch = generate_channels(c, 1);
  const RisVector ris = initial_ris(ch, c, RisMode::kActive, 1);
  EXPECT_FALSE(init_point(ch, ris, c).feasible);
}

TEST(TraceCsv, OneRowPerIteration) {
  std::vector<ScaTraceRow> rows(3);
  const std::string csv = sca_trace_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

}  // namespace
}  // namespace risrsma
