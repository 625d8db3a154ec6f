// SPDX-License-Identifier: Apache-2.0

// Random convex QCQPs and an independent first-order optimality checker.
// The checker works from the raw problem matrices, not from the solver's
// internal representation.

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "risrsma/convex_program.hpp"

namespace risrsma::oracle {

struct RawQcqp {
  int n = 0;
  Eigen::VectorXd c;   // maximize c'x - x'Q0 x
  Eigen::MatrixXd Q0;  // PSD
  std::vector<Eigen::MatrixXd> P;  // x'P x + q'x + r <= 0
  std::vector<Eigen::VectorXd> q;
  std::vector<double> r;
  std::vector<Eigen::VectorXd> a;  // a'x <= b
  std::vector<double> b;
};

inline RawQcqp random_qcqp(std::mt19937_64& rng, int n, int m_quad, int m_lin) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.2, 2.0);
  auto randn = [&](int rows, int cols) {
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) M(i, j) = nd(rng);
    return M;
  };
  RawQcqp p;
  p.n = n;
  p.c = randn(n, 1);
  const Eigen::MatrixXd B = randn(std::max(1, n / 2), n);
  p.Q0 = 0.1 * B.transpose() * B / n;
  for (int i = 0; i < m_quad; ++i) {
    const Eigen::MatrixXd C = randn(n, n);
    p.P.push_back(C.transpose() * C / n);
    p.q.push_back(randn(n, 1));
    p.r.push_back(-ud(rng) * n);  // x = 0 strictly feasible
  }
  for (int i = 0; i < m_lin; ++i) {
    p.a.push_back(randn(n, 1));
    p.b.push_back(ud(rng));
  }
  return p;
}

inline solver::ConvexProgram to_program(const RawQcqp& raw) {
  solver::ConvexProgram prog(raw.n);
  prog.objective.linear = raw.c;
  prog.objective.quadratic = -raw.Q0;
  for (size_t i = 0; i < raw.P.size(); ++i) {
    solver::QuadraticConstraint qc;
    qc.P = solver::to_sparse(raw.P[i]);
    qc.q = raw.q[i];
    qc.r = raw.r[i];
    qc.name = "q" + std::to_string(i);
    prog.constraints.emplace_back(qc);
  }
  for (size_t i = 0; i < raw.a.size(); ++i) {
    solver::LinearConstraint lc;
    lc.a = raw.a[i];
    lc.b = raw.b[i];
    prog.constraints.emplace_back(lc);
  }
  return prog;
}

struct KktReport {
  double stationarity = 0.0;  // ||grad L||_inf / (1 + ||grad f0||_inf)
  double complementarity = 0.0;
  double primal = 0.0;
  double dual_sign = 0.0;  // most negative multiplier, as a positive number
  double worst() const {
    return std::max({stationarity, complementarity, primal, dual_sign});
  }
};

// Conditions for min  -c'x + x'Q0 x  s.t. the raw constraints, with the
// multipliers ordered quadratic-first as in to_program().
inline KktReport check_kkt(const RawQcqp& raw, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& duals) {
  KktReport rep;
  Eigen::VectorXd g0 = -raw.c;
  for (int i = 0; i < raw.n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < raw.n; ++j) acc += (raw.Q0(i, j) + raw.Q0(j, i)) * x(j);
    g0(i) += acc;
  }
  Eigen::VectorXd gl = g0;
  const double f0 = -raw.c.dot(x) + x.dot(raw.Q0 * x);
  const size_t mq = raw.P.size();
  for (size_t k = 0; k < mq; ++k) {
    const double lam = duals(static_cast<Eigen::Index>(k));
    double f = raw.r[k];
    for (int i = 0; i < raw.n; ++i) {
      f += raw.q[k](i) * x(i);
      for (int j = 0; j < raw.n; ++j) f += x(i) * raw.P[k](i, j) * x(j);
    }
    for (int i = 0; i < raw.n; ++i) {
      double gi = raw.q[k](i);
      for (int j = 0; j < raw.n; ++j) gi += (raw.P[k](i, j) + raw.P[k](j, i)) * x(j);
      gl(i) += lam * gi;
    }
    rep.primal = std::max(rep.primal, std::max(f, 0.0));
    rep.complementarity = std::max(rep.complementarity, std::abs(lam * f) / (1.0 + std::abs(f0)));
    rep.dual_sign = std::max(rep.dual_sign, -lam);
  }
  for (size_t k = 0; k < raw.a.size(); ++k) {
    const double lam = duals(static_cast<Eigen::Index>(mq + k));
    const double f = raw.a[k].dot(x) - raw.b[k];
    gl += lam * raw.a[k];
    rep.primal = std::max(rep.primal, std::max(f, 0.0));
    rep.complementarity = std::max(rep.complementarity, std::abs(lam * f) / (1.0 + std::abs(f0)));
    rep.dual_sign = std::max(rep.dual_sign, -lam);
  }
  rep.stationarity = gl.cwiseAbs().maxCoeff() / (1.0 + g0.cwiseAbs().maxCoeff());
  return rep;
}

}  // namespace risrsma::oracle
