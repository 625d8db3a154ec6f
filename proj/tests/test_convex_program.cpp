// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "risrsma/kkt_oracle.hpp"
#include "risrsma/convex_program.hpp"

namespace risrsma::solver {
namespace {

using oracle::check_kkt;
using oracle::random_qcqp;
using oracle::to_program;

CMat random_hermitian(std::mt19937_64& rng, int m, bool psd) {
  std::normal_distribution<double> nd;
  CMat X(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = Complex(nd(rng), nd(rng));
  return psd ? CMat(X * X.adjoint()) : CMat(X + X.adjoint());
}

CVec random_cvec(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> nd;
  CVec z(m);
  for (int i = 0; i < m; ++i) z(i) = Complex(nd(rng), nd(rng));
  return z;
}

TEST(RealEmbed, IdentityMapsToIdentity) {
  const RealForm f = real_embed(CMat::Identity(5, 5), CVec::Zero(5));
  EXPECT_TRUE(f.S.isApprox(RMat::Identity(10, 10)));
}

TEST(RealEmbed, MatchesComplexEvaluation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 7;
    const CMat H = random_hermitian(rng, m, false);
    const CVec c = random_cvec(rng, m);
    const CVec psi = random_cvec(rng, m);
    const RealForm f = real_embed(H, c);
    const RVec x = stack(psi);
    const double direct = (psi.adjoint() * H * psi)(0).real();
    const double linear = (psi.adjoint() * c)(0).real();
    EXPECT_NEAR(x.dot(f.S * x), direct, 1e-12 * (1.0 + std::abs(direct)));
    EXPECT_NEAR(f.c.dot(x), linear, 1e-12 * (1.0 + std::abs(linear)));
    EXPECT_TRUE(unstack(x).isApprox(psi));
  }
}

TEST(RealEmbed, PreservesPositiveSemidefiniteness) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const RealForm f = real_embed(random_hermitian(rng, 6, true), CVec::Zero(6));
    Eigen::SelfAdjointEigenSolver<RMat> es(f.S);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
  }
}

TEST(RealEmbed, RejectsNonHermitian) {
  CMat H = CMat::Zero(2, 2);
  H(0, 1) = 1.0;
  EXPECT_THROW(real_embed(H, CVec::Zero(2)), std::invalid_argument);
}

TEST(Solve, UnconstrainedProjection) {
  ConvexProgram p(4);
  RVec a(4);
  a << 1.0, -2.0, 0.5, 3.0;
  // maximize -||x - a||^2 = -x'x + 2a'x - a'a
  p.objective.quadratic = -RMat::Identity(4, 4);
  p.objective.linear = 2.0 * a;
  p.objective.constant = -a.squaredNorm();
  const Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal) << s.message;
  EXPECT_LT((s.x - a).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Solve, BallConstrainedLinearProgram) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + trial;
    RVec c(n);
    for (int i = 0; i < n; ++i) c(i) = nd(rng);
    ConvexProgram p(n);
    p.objective.linear = c;
    QuadraticConstraint ball;
    ball.P = to_sparse(RMat::Identity(n, n));
    ball.q = RVec::Zero(n);
    ball.r = -1.0;
    p.constraints.emplace_back(ball);
    const Solution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::kOptimal);
    EXPECT_NEAR(s.objective_value, c.norm(), 1e-8);
    EXPECT_LT((s.x - c / c.norm()).norm(), 1e-4);
  }
}

TEST(Solve, RandomQcqpsPassIndependentKktCheck) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + (trial * 7) % 31;
    const auto raw = random_qcqp(rng, n, 1 + trial % 4, trial % 3);
    const auto prog = to_program(raw);
    const Solution s = solve(prog);
    ASSERT_EQ(s.status, SolveStatus::kOptimal) << "trial " << trial << " " << s.message;
    const auto rep = check_kkt(raw, s.x, s.duals);
    EXPECT_LE(rep.worst(), 1e-6) << "trial " << trial << " stat " << rep.stationarity
                                 << " comp " << rep.complementarity;
  }
}

TEST(Solve, DeterministicAcrossRepeatedCalls) {
  std::mt19937_64 rng(5);
  const auto prog = to_program(random_qcqp(rng, 12, 3, 2));
  const Solution a = solve(prog);
  const Solution b = solve(prog);
  EXPECT_EQ(a.objective_value, b.objective_value);
  EXPECT_EQ(a.x, b.x);
}

TEST(Solve, TighteningNeverIncreasesOptimum) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto raw = random_qcqp(rng, 8, 2, 1);
    auto loose = to_program(raw);
    auto tight = loose;
    auto& qc = std::get<QuadraticConstraint>(tight.constraints[0]);
    qc.r *= 0.5;  // smaller sublevel set, still contains x = 0
    const double v_loose = solve(loose).objective_value;
    const double v_tight = solve(tight).objective_value;
    EXPECT_LE(v_tight, v_loose + 1e-8);
  }
}

TEST(Solve, PhaseOneFromInfeasibleStart) {
  ConvexProgram p(2);
  p.objective.linear = RVec::Constant(2, -1.0);  // push toward the lower bounds
  p.lower = RVec::Constant(2, 1.0);
  p.upper = RVec::Constant(2, 3.0);
  SolverOptions opt;
  opt.initial_point = RVec::Constant(2, -10.0);
  const Solution s = solve(p, opt);
  ASSERT_EQ(s.status, SolveStatus::kOptimal) << s.message;
  EXPECT_NEAR(s.x(0), 1.0, 1e-6);
  EXPECT_NEAR(s.x(1), 1.0, 1e-6);
  EXPECT_GT(s.lower_duals(0), 0.5);
}

TEST(Solve, DetectsInfeasibility) {
  ConvexProgram p(1);
  LinearConstraint le{RVec::Ones(1), -1.0};  // x <= -1
  p.constraints.emplace_back(le);
  p.lower(0) = 0.0;
  const Solution s = solve(p);
  EXPECT_EQ(s.status, SolveStatus::kInfeasible);
}

TEST(Solve, RejectsIndefiniteQuadraticConstraint) {
  ConvexProgram p(2);
  QuadraticConstraint qc;
  RMat P(2, 2);
  P << 1.0, 0.0, 0.0, -1.0;
  qc.P = to_sparse(P);
  qc.q = RVec::Zero(2);
  qc.r = -1.0;
  p.constraints.emplace_back(qc);
  EXPECT_THROW(solve(p), ConvexityError);
}

TEST(Solve, EqualityConstraints) {
  // maximize -||x||^2 s.t. x0 + x1 + x2 = 3  ->  x = (1,1,1)
  ConvexProgram p(3);
  p.objective.quadratic = -RMat::Identity(3, 3);
  p.constraints.emplace_back(LinearConstraint{RVec::Ones(3), 3.0, Sense::kEqual, "sum"});
  const Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal) << s.message;
  EXPECT_LT((s.x - RVec::Ones(3)).norm(), 1e-8);
  EXPECT_NEAR(s.duals(0), -2.0, 1e-6);  // 2x + nu = 0 at x = 1
}

TEST(Solve, ExponentialAndLogForms) {
  // maximize log2(1 + y) + r  s.t.  2^(1 - r) <= 1 + y,  r <= log2(1 + k),
  // y <= 3, k <= 1, r >= 0.  Optimum: y = 3, k = 1, r = 1.
  ConvexProgram p(3);  // [y, r, k]
  p.objective.log_terms.push_back({1.0, RVec::Unit(3, 0), 0.0});
  p.objective.linear = RVec::Unit(3, 1);
  p.constraints.emplace_back(ExpConstraint{-RVec::Unit(3, 1), 1.0, RVec::Unit(3, 0), 1.0, "qos"});
  p.constraints.emplace_back(LogConstraint{RVec::Unit(3, 1), 0.0, RVec::Unit(3, 2), 0.0, "cap"});
  p.upper(0) = 3.0;
  p.upper(2) = 1.0;
  p.lower(1) = 0.0;
  SolverOptions opt;
  opt.initial_point = RVec::Constant(3, 0.5);
  const Solution s = solve(p, opt);
  ASSERT_EQ(s.status, SolveStatus::kOptimal) << s.message;
  EXPECT_NEAR(s.x(0), 3.0, 1e-6);
  EXPECT_NEAR(s.x(1), 1.0, 1e-6);
  EXPECT_NEAR(s.objective_value, 3.0, 1e-6);
}

TEST(Solve, SecondOrderCone) {
  // maximize x0 + x1 s.t. ||(x0, x1)|| <= 2  ->  value 2*sqrt(2)
  ConvexProgram p(2);
  p.objective.linear = RVec::Ones(2);
  p.constraints.emplace_back(
      SecondOrderConeConstraint{RMat::Identity(2, 2), RVec::Zero(2), RVec::Zero(2), 2.0, "disk"});
  const Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal) << s.message;
  EXPECT_NEAR(s.objective_value, 2.0 * std::sqrt(2.0), 1e-7);
}

TEST(Dump, ListsConstraints) {
  ConvexProgram p(2);
  p.constraints.emplace_back(LinearConstraint{RVec::Ones(2), 1.0, Sense::kLessEqual, "budget"});
  std::ostringstream os;
  dump(p, os);
  EXPECT_NE(os.str().find("budget"), std::string::npos);
  EXPECT_NE(os.str().find("variables 2"), std::string::npos);
}

}  // namespace
}  // namespace risrsma::solver
