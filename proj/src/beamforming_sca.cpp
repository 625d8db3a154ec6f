// SPDX-License-Identifier: Apache-2.0

#include "risrsma/beamforming_sca.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace risrsma {

namespace {

constexpr double kAuxFloor = 1e-9;

double noise_power(const ChannelSet& ch, const CVec& psi, int k, const ScenarioConfig& cfg) {
  return ris_noise(ch, psi, k, cfg.sigma_z2) + cfg.sigma_k2;
}

RVec unit(int n, int i) { return RVec::Unit(n, i); }

// Adds real_embed(H) to the diagonal block of beam m.
void add_beam_block(std::vector<Eigen::Triplet<double>>& trips, const ScaLayout& lay, int m,
                    const RMat& S) {
  const int o = lay.beam(m);
  for (int i = 0; i < S.rows(); ++i)
    for (int j = 0; j < S.cols(); ++j)
      if (S(i, j) != 0.0) trips.emplace_back(o + i, o + j, S(i, j));
}

Eigen::SparseMatrix<double> from_triplets(int n, const std::vector<Eigen::Triplet<double>>& t) {
  Eigen::SparseMatrix<double> P(n, n);
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

double objective_of(const TransmitDesign& d, const RateReport& rep) {
  return d.r_c.sum() + rep.R_p.sum();
}

}  // namespace

int ScaLayout::beam(int m) const { return (common ? m : m - 1) * 2 * N_T; }
int ScaLayout::rc(int k) const { return (K + (common ? 1 : 0)) * 2 * N_T + k; }
int ScaLayout::xi(int k) const { return rc(0) + (common ? K : 0) + k; }
int ScaLayout::beta(int k) const { return xi(0) + K + k; }
int ScaLayout::kappa(int k) const { return beta(0) + K + k; }
int ScaLayout::lambda(int k) const { return kappa(0) + K + k; }

double taylor_sqrt_bound(double beta, double xi, double beta0, double xi0) {
  return 0.5 * std::sqrt(beta0 / xi0) * xi + 0.5 * std::sqrt(xi0 / beta0) * beta;
}

double dc_product_bound(double lambda, double kappa, double lambda0, double kappa0) {
  // 0.25 ((l + k)^2 - 2 d0 (l - k) + d0^2) without the cancellation.
  const double e = lambda - kappa - (lambda0 - kappa0);
  return lambda * kappa + 0.25 * e * e;
}

double dc_power_minorant(Complex a, Complex a0) {
  return std::norm(a) - std::norm(a - a0);
}

ScaAuxiliaries tight_auxiliaries(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
                                 const ScenarioConfig& cfg) {
  const int K = ch.K();
  ScaAuxiliaries aux{RVec(K), RVec(K), RVec(K), RVec(K)};
  for (int k = 0; k < K; ++k) {
    const CVec h = equivalent_channel(ch, psi, k);
    const double nk = noise_power(ch, psi, k, cfg);
    double total = 0.0;
    for (int i = 0; i < K; ++i) total += std::norm(h.dot(d.w[i]));
    const double own = std::norm(h.dot(d.w[k]));
    aux.beta(k) = (total - own + nk) / nk;
    aux.lambda(k) = (total + nk) / nk;
    aux.xi(k) = own / nk / aux.beta(k);
    aux.kappa(k) = std::norm(h.dot(d.w0)) / nk / aux.lambda(k);
  }
  return aux;
}

InitResult init_point(const ChannelSet& ch, const RisVector& ris, const ScenarioConfig& cfg,
                      const ScaOptions& opts) {
  const int K = ch.K();
  const int N = ch.N_T();
  InitResult out;
  TransmitDesign d = TransmitDesign::zeros(K, N);
  const double p_priv = (opts.common_stream ? 0.8 : 1.0) * cfg.P_bs_max / K;
  CVec sum = CVec::Zero(N);
  for (int k = 0; k < K; ++k) {
    const CVec h = equivalent_channel(ch, ris.psi, k);
    const double nh = h.norm();
    const CVec dir = nh > 0.0 ? CVec(h / nh) : CVec(CVec::Unit(N, 0));
    d.w[k] = std::sqrt(p_priv) * dir;
    sum += dir;
  }
  if (opts.common_stream) {
    const double ns = sum.norm();
    d.w0 = std::sqrt(0.2 * cfg.P_bs_max) * (ns > 0.0 ? CVec(sum / ns) : CVec(CVec::Unit(N, 0)));
  }
  // Strictly inside the power budgets.
  const double shrink = 1.0 - 1e-6;
  d.w0 *= std::sqrt(shrink);
  for (auto& wk : d.w) wk *= std::sqrt(shrink);
  if (ris.mode == RisMode::kActive) {
    const double fixed = ris.psi.squaredNorm() * cfg.sigma_z2;
    const double used = ris_power(ch, ris.psi, d, cfg.sigma_z2);
    if (fixed >= cfg.P_a_max) {
      out.design = d;
      out.message = "RIS amplification noise alone exceeds the RIS power budget";
      return out;
    }
    if (used > cfg.P_a_max) {
      const double s = std::sqrt(shrink * (cfg.P_a_max - fixed) / (used - fixed));
      d.w0 *= s;
      for (auto& wk : d.w) wk *= s;
    }
  }

  const Sinrs s = sinrs(ch, ris.psi, d, cfg.sigma_z2, cfg.sigma_k2);
  const RVec Rp = (1.0 + s.gamma_p.array()).log() / std::log(2.0);
  if (opts.common_stream) {
    const std::optional<RVec> rc = allocate_common_rate(s, cfg.R_min);
    if (!rc) {
      out.design = d;
      out.message = "QoS targets not reachable from the initial beams";
      return out;
    }
    d.r_c = *rc;
  } else if ((Rp.array() < cfg.R_min).any()) {
    out.design = d;
    out.message = "QoS targets not reachable from the initial beams";
    return out;
  }
  out.design = d;
  out.aux = tight_auxiliaries(ch, ris.psi, d, cfg);
  out.feasible = evaluate(ch, ris, d, cfg).feasible;
  if (!out.feasible) out.message = "initial point violates P0";
  return out;
}

ScaSubproblem build_subproblem(const ChannelSet& ch, const RisVector& ris,
                               const TransmitDesign& prev, const ScaAuxiliaries& aux,
                               const ScenarioConfig& cfg, const ScaOptions& opts) {
  const int K = ch.K();
  const int N = ch.N_T();
  for (int k = 0; k < K; ++k) {
    if (!(aux.xi(k) > 0.0) || !(aux.beta(k) > 0.0))
      throw std::domain_error("build_subproblem: degenerate linearization point");
  }
  ScaSubproblem sub;
  ScaLayout& lay = sub.layout;
  lay.K = K;
  lay.N_T = N;
  lay.common = opts.common_stream;
  lay.n = lay.xi(0) + K * (lay.common ? 4 : 2);
  const int n = lay.n;
  sub.power_scale = std::sqrt(cfg.P_bs_max);
  sub.xi_scale = aux.xi;
  sub.beta_scale = aux.beta.cwiseQuotient(aux.lambda);

  // Rotate each private beam so its own effective gain is real nonnegative.
  sub.expansion = prev;
  for (int k = 0; k < K; ++k) {
    const CVec h = equivalent_channel(ch, ris.psi, k);
    sub.h_hat.push_back(h * (sub.power_scale / std::sqrt(noise_power(ch, ris.psi, k, cfg) * aux.lambda(k))));
    const Complex g = h.dot(prev.w[k]);
    if (std::abs(g) > 0.0) sub.expansion.w[k] *= std::conj(g) / std::abs(g);
  }
  const TransmitDesign& e = sub.expansion;

  sub.x0 = RVec::Zero(n);
  if (lay.common) sub.x0.segment(lay.beam(0), 2 * N) = solver::stack(e.w0) / sub.power_scale;
  for (int k = 0; k < K; ++k) {
    sub.x0.segment(lay.beam(k + 1), 2 * N) = solver::stack(e.w[k]) / sub.power_scale;
    sub.x0(lay.xi(k)) = 1.0;
    sub.x0(lay.beta(k)) = 1.0;
    if (lay.common) {
      sub.x0(lay.rc(k)) = e.r_c(k);
      sub.x0(lay.kappa(k)) = aux.kappa(k);
      sub.x0(lay.lambda(k)) = 1.0;
    }
  }

  solver::ConvexProgram& p = sub.program;
  p = solver::ConvexProgram(n);
  for (int k = 0; k < K; ++k) {
    if (lay.common) p.objective.linear(lay.rc(k)) = 1.0;
    p.objective.log_terms.push_back({1.0, sub.xi_scale(k) * unit(n, lay.xi(k)), 0.0});
    p.lower(lay.xi(k)) = 0.0;
    if (lay.common) {
      p.lower(lay.rc(k)) = 0.0;  // r_c >= 0
      p.lower(lay.kappa(k)) = 0.0;
    }
  }
  const int first_beam = lay.common ? 0 : 1;

  // sum r_c <= log2(1 + kappa_k)
  if (lay.common) {
    RVec e_rc = RVec::Zero(n);
    for (int k = 0; k < K; ++k) e_rc(lay.rc(k)) = 1.0;
    for (int k = 0; k < K; ++k)
      p.constraints.emplace_back(solver::LogConstraint{e_rc, 0.0, unit(n, lay.kappa(k)), 0.0,
                                                       "common_rate[" + std::to_string(k + 1) + "]"});
  }
  // BS power
  {
    std::vector<Eigen::Triplet<double>> t;
    for (int m = first_beam; m <= K; ++m)
      for (int i = 0; i < 2 * N; ++i) t.emplace_back(lay.beam(m) + i, lay.beam(m) + i, 1.0);
    p.constraints.emplace_back(solver::QuadraticConstraint{from_triplets(n, t), RVec::Zero(n), -1.0, "bs_power"});
  }
  // RIS power, exact in w or the spectral-norm surrogate.
  if (ris.mode == RisMode::kActive) {
    const double room = cfg.P_a_max - ris.psi.squaredNorm() * cfg.sigma_z2;
    if (!(room > 0.0)) throw std::domain_error("build_subproblem: RIS noise exceeds the RIS budget");
    const CMat PG = ris.psi.asDiagonal() * ch.G;
    RMat S;
    if (cfg.spectral_power_surrogate) {
      Eigen::JacobiSVD<CMat> svd(PG);
      const double s2 = svd.singularValues().size() ? std::pow(svd.singularValues()(0), 2) : 0.0;
      S = RMat::Identity(2 * N, 2 * N) * s2;
    } else {
      S = solver::real_embed(PG.adjoint() * PG, CVec::Zero(N)).S;
    }
    S *= cfg.P_bs_max / room;
    std::vector<Eigen::Triplet<double>> t;
    for (int m = first_beam; m <= K; ++m) add_beam_block(t, lay, m, S);
    p.constraints.emplace_back(solver::QuadraticConstraint{from_triplets(n, t), RVec::Zero(n), -1.0, "ris_power"});
  }
  // QoS
  for (int k = 0; k < K; ++k) {
    const std::string name = "qos[" + std::to_string(k + 1) + "]";
    if (lay.common) {
      p.constraints.emplace_back(
          solver::ExpConstraint{-unit(n, lay.rc(k)), cfg.R_min, sub.xi_scale(k) * unit(n, lay.xi(k)), 1.0, name});
    } else {
      p.constraints.emplace_back(solver::LinearConstraint{
          -unit(n, lay.xi(k)), -std::expm1(cfg.R_min * std::log(2.0)) / sub.xi_scale(k),
          solver::Sense::kLessEqual, name});
    }
  }
  std::vector<RMat> Hk;
  for (int k = 0; k < K; ++k) {
    const CVec& h = sub.h_hat[k];
    Hk.push_back(solver::real_embed(h * h.adjoint(), CVec::Zero(N)).S);
  }
  // Interference-plus-noise bound, divided by beta0
  for (int k = 0; k < K; ++k) {
    const double bs = sub.beta_scale(k);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < K; ++i)
      if (i != k) add_beam_block(t, lay, i + 1, Hk[k] / bs);
    p.constraints.emplace_back(solver::QuadraticConstraint{
        from_triplets(n, t), -unit(n, lay.beta(k)), 1.0 / (aux.lambda(k) * bs),
        "interference[" + std::to_string(k + 1) + "]"});
  }
  // Re(h^H w_k) >= first-order expansion of sqrt(beta xi), divided by
  // sqrt(beta0 xi0); in scaled slacks the expansion point is (1, 1).
  for (int k = 0; k < K; ++k) {
    const double g0 = std::sqrt(sub.beta_scale(k) * sub.xi_scale(k));
    RVec a = RVec::Zero(n);
    a.segment(lay.beam(k + 1), 2 * N) = -solver::stack(sub.h_hat[k]) / g0;
    a(lay.xi(k)) = 0.5;
    a(lay.beta(k)) = 0.5;
    p.constraints.emplace_back(
        solver::LinearConstraint{a, 0.0, solver::Sense::kLessEqual, "private_sinr[" + std::to_string(k + 1) + "]"});
  }
  if (lay.common) {
    // Total received power bound
    for (int k = 0; k < K; ++k) {
      std::vector<Eigen::Triplet<double>> t;
      for (int i = 0; i < K; ++i) add_beam_block(t, lay, i + 1, Hk[k]);
      p.constraints.emplace_back(solver::QuadraticConstraint{
          from_triplets(n, t), -unit(n, lay.lambda(k)), 1.0 / aux.lambda(k), "received_power[" + std::to_string(k + 1) + "]"});
    }
    // dc_product_bound(lambda, kappa) <= dc_power_minorant(h^H w0)
    for (int k = 0; k < K; ++k) {
      const CVec& h = sub.h_hat[k];
      const Complex a0 = h.dot(e.w0 / sub.power_scale);
      const double d0 = 1.0 - aux.kappa(k);
      const int il = lay.lambda(k), ik = lay.kappa(k);
      std::vector<Eigen::Triplet<double>> t{{il, il, 0.25}, {ik, ik, 0.25}, {il, ik, 0.25}, {ik, il, 0.25}};
      RVec q = RVec::Zero(n);
      q.segment(lay.beam(0), 2 * N) = -2.0 * solver::stack(h * a0);
      q(il) = -0.5 * d0;
      q(ik) = 0.5 * d0;
      p.constraints.emplace_back(solver::QuadraticConstraint{
          from_triplets(n, t), q, 0.25 * d0 * d0 + std::norm(a0), "common_sinr[" + std::to_string(k + 1) + "]"});
    }
  }
  return sub;
}

TransmitDesign extract_design(const ScaSubproblem& sub, const RVec& x) {
  const ScaLayout& lay = sub.layout;
  TransmitDesign d = TransmitDesign::zeros(lay.K, lay.N_T);
  if (lay.common) d.w0 = sub.power_scale * solver::unstack(x.segment(lay.beam(0), 2 * lay.N_T));
  for (int k = 0; k < lay.K; ++k) {
    d.w[k] = sub.power_scale * solver::unstack(x.segment(lay.beam(k + 1), 2 * lay.N_T));
    if (lay.common) d.r_c(k) = std::max(0.0, x(lay.rc(k)));
  }
  return d;
}

ScaResult sca_solve(const ChannelSet& ch, const RisVector& ris, const TransmitDesign& init,
                    const ScenarioConfig& cfg, const ScaOptions& opts) {
  ScaResult res;
  res.design = init;
  RateReport rep = evaluate(ch, ris, init, cfg);
  if (!rep.feasible) {
    res.degraded = true;
    res.message = "initial design violates P0";
    return res;
  }
  double obj = objective_of(init, rep);
  for (int it = 1; it <= cfg.max_inner; ++it) {
    ScaAuxiliaries aux = tight_auxiliaries(ch, ris.psi, res.design, cfg);
    aux.xi = aux.xi.cwiseMax(kAuxFloor);
    aux.kappa = aux.kappa.cwiseMax(0.0);
    const ScaSubproblem sub = build_subproblem(ch, ris, res.design, aux, cfg, opts);
    solver::SolverOptions so;
    so.tol = cfg.solver_tol;
    so.initial_point = sub.x0;
    const solver::Solution sol = solver::solve(sub.program, so);

    ScaTraceRow row;
    row.iteration = it;
    row.status = solver::to_string(sol.status);
    row.surrogate_objective = sol.objective_value;
    row.max_residual = std::max(sol.kkt_residual, sol.primal_residual);
    row.newton_iterations = sol.newton_iterations;
    if (!solver::usable(sol, so.tol)) {
      row.true_objective = obj;
      res.trace.push_back(row);
      res.degraded = true;
      res.message = "subproblem " + row.status;
      break;
    }
    TransmitDesign cand = extract_design(sub, sol.x);
    // The solver's r_c may sit up to its tolerance above the common capacity
    // of the new beams; the exact allocation removes that and loses nothing.
    if (opts.common_stream) {
      const auto rc = allocate_common_rate(sinrs(ch, ris.psi, cand, cfg.sigma_z2, cfg.sigma_k2), cfg.R_min);
      if (rc) cand.r_c = *rc;
    }
    const RateReport crep = evaluate(ch, ris, cand, cfg);
    const double cobj = objective_of(cand, crep);
    row.true_objective = crep.feasible ? cobj : obj;
    if (!crep.feasible) {
      row.status += ":infeasible";
      res.trace.push_back(row);
      res.degraded = true;
      res.message = "subproblem point violates P0";
      break;
    }
    if (cobj < obj) {
      // Solver noise at a fixed point; keep the previous design.
      row.status += ":rejected";
      row.true_objective = obj;
      res.trace.push_back(row);
      if (cobj < obj - 1e-6) {
        res.degraded = true;
        res.message = "objective decreased";
      }
      break;
    }
    res.trace.push_back(row);
    const double gain = cobj - obj;
    res.design = cand;
    obj = cobj;
    if (gain < cfg.eps_inner) break;
  }
  return res;
}

std::string sca_trace_csv(const std::vector<ScaTraceRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,surrogate_objective,true_objective,max_residual,status,newton_iterations\n";
  for (const auto& r : rows)
    os << r.iteration << "," << r.surrogate_objective << "," << r.true_objective << ","
       << r.max_residual << "," << r.status << "," << r.newton_iterations << "\n";
  return os.str();
}

}  // namespace risrsma
