// SPDX-License-Identifier: Apache-2.0

#include "risrsma/ris_fp_qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "risrsma/convex_program.hpp"

namespace risrsma {

namespace {

// Improvements of the true objective below this are treated as no change,
// which makes a stationary psi an exact fixed point of ris_update.
constexpr double kAcceptGain = 1e-8;
constexpr int kExtrapolationTries = 8;

double sinr_threshold(double rate) { return std::expm1(rate * std::log(2.0)); }

double hform(const CMat& M, const CVec& x) { return x.dot(M * x).real(); }
double reform(const CVec& x, const CVec& c) { return x.dot(c).real(); }

struct Received {
  RVec signal;  // |h_k^H w_k|^2
  RVec total;   // sum_i |h_k^H w_i|^2 + dynamic noise + sigma_k^2
  CVec hw;      // h_k^H w_k
};

Received received(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
                  double sigma_z2, double sigma_k2) {
  const int K = ch.K();
  Received r{RVec(K), RVec(K), CVec(K)};
  for (int k = 0; k < K; ++k) {
    const CVec h = equivalent_channel(ch, psi, k);
    double tot = ris_noise(ch, psi, k, sigma_z2) + sigma_k2;
    for (int i = 0; i < K; ++i) tot += std::norm(h.dot(d.w[i]));
    r.hw(k) = h.dot(d.w[k]);
    r.signal(k) = std::norm(r.hw(k));
    r.total(k) = tot;
  }
  return r;
}

double true_objective(const ChannelSet& ch, const RisVector& ris, const TransmitDesign& d,
                      const ScenarioConfig& cfg, bool* feasible) {
  const RateReport rep = evaluate(ch, ris, d, cfg);
  *feasible = rep.feasible;
  return rep.sum_rate;
}

solver::QuadraticConstraint restricted_rate_constraint(const RateConstraintForm& form,
                                                       const CVec& psi0, double den0,
                                                       double c, const std::string& name) {
  const PsdSplit sp = psd_split(form.M);
  // psi^H M- psi - Re(psi^H (2 M+ psi0 + N)) + psi0^H M+ psi0 + rhs <= 0
  const double s = 1.0 / den0;
  const CVec lin = 2.0 * sp.plus * psi0 + form.N;
  const solver::RealForm rf = solver::real_embed(sp.minus, lin);
  solver::QuadraticConstraint qc;
  qc.P = solver::to_sparse(s * c * c * rf.S);
  qc.q = -s * c * rf.c;
  qc.r = s * (hform(sp.plus, psi0) + form.rhs);
  // Near-vacuous thresholds leave every coefficient tiny.
  double mag = std::abs(qc.r);
  if (qc.q.size()) mag = std::max(mag, qc.q.cwiseAbs().maxCoeff());
  for (int j = 0; j < qc.P.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator itp(qc.P, j); itp; ++itp)
      mag = std::max(mag, std::abs(itp.value()));
  if (mag > 0.0) {
    qc.P /= mag;
    qc.q /= mag;
    qc.r /= mag;
  }
  qc.name = name;
  return qc;
}

}  // namespace

FpAuxiliaries closed_form_aux(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
                              double sigma_z2, double sigma_k2) {
  const Received r = received(ch, psi, d, sigma_z2, sigma_k2);
  const int K = ch.K();
  FpAuxiliaries aux{RVec(K), CVec(K)};
  for (int k = 0; k < K; ++k) {
    aux.tau(k) = r.signal(k) / (r.total(k) - r.signal(k));
    aux.upsilon(k) = std::sqrt(1.0 + aux.tau(k)) * r.hw(k) / r.total(k);
  }
  return aux;
}

F12 eval_f1_f2(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
               const FpAuxiliaries& aux, double sigma_z2, double sigma_k2) {
  const Received r = received(ch, psi, d, sigma_z2, sigma_k2);
  F12 out;
  for (int k = 0; k < ch.K(); ++k) {
    const double t = aux.tau(k);
    const double base = std::log2(1.0 + t) - t;
    out.f1 += base + (1.0 + t) * r.signal(k) / r.total(k);
    const Complex v = aux.upsilon(k);
    out.f2 += base + 2.0 * std::sqrt(1.0 + t) * (std::conj(v) * r.hw(k)).real() -
              std::norm(v) * r.total(k);
  }
  return out;
}

UserQuadratics assemble_user_quadratics(const ChannelSet& ch, const TransmitDesign& d, int k,
                                        double sigma_z2, double sigma_k2) {
  const int K = ch.K();
  const int L = ch.L();
  const CVec& fk = ch.f[k];
  const auto u_of = [&](const CVec& w) -> CVec { return fk.cwiseProduct((ch.G * w).conjugate()); };
  const auto c_of = [&](const CVec& w) { return ch.g[k].dot(w); };

  UserQuadratics q;
  const CVec uk = u_of(d.w[k]);
  const CVec u0 = u_of(d.w0);
  const Complex ck = c_of(d.w[k]);
  const Complex c0 = c_of(d.w0);
  q.A1p = std::norm(ck);
  q.A1c = std::norm(c0);
  q.B1p = uk * uk.adjoint();
  q.B1c = u0 * u0.adjoint();
  q.C1p = 2.0 * ck * uk;
  q.C1c = 2.0 * c0 * u0;
  q.D = (sigma_z2 * fk.cwiseAbs2()).cast<Complex>().asDiagonal();
  q.E = sigma_k2;
  q.F = CMat::Zero(L, L);
  q.J = CVec::Zero(L);
  for (int j = 0; j < K; ++j) {
    if (j == k) continue;
    const CVec uj = u_of(d.w[j]);
    const Complex cj = c_of(d.w[j]);
    q.E += std::norm(cj);
    q.F += uj * uj.adjoint();
    q.J += 2.0 * cj * uj;
  }
  q.A2p = q.A1p + q.E;
  q.B2p = q.B1p + q.F;
  q.C2p = q.C1p + q.J;
  return q;
}

ConstraintForms constraint_forms(const std::vector<UserQuadratics>& quads, const RVec& r_c,
                                 double R_min, bool common_stream) {
  ConstraintForms out;
  const int K = static_cast<int>(quads.size());
  for (int k = 0; k < K; ++k) {
    const UserQuadratics& q = quads[k];
    RateConstraintForm f;
    f.threshold = std::max(0.0, sinr_threshold(R_min - r_c(k)));
    f.vacuous = f.threshold <= 0.0;
    f.M = q.B1p - f.threshold * (q.F + q.D);
    f.N = q.C1p - f.threshold * q.J;
    f.rhs = f.threshold * q.E - q.A1p;
    out.priv.push_back(std::move(f));
  }
  if (common_stream) {
    const double g0 = std::max(0.0, sinr_threshold(r_c.sum()));
    for (int k = 0; k < K; ++k) {
      const UserQuadratics& q = quads[k];
      RateConstraintForm f;
      f.threshold = g0;
      f.vacuous = g0 <= 0.0;
      f.M = q.B1c - g0 * (q.B2p + q.D);
      f.N = q.C1c - g0 * q.C2p;
      f.rhs = g0 * q.A2p - q.A1c;
      out.common.push_back(std::move(f));
    }
  }
  return out;
}

QcqpForms objective_forms(const std::vector<UserQuadratics>& quads, const FpAuxiliaries& aux,
                          const ChannelSet& ch, const TransmitDesign& d, double sigma_z2) {
  const int L = ch.L();
  QcqpForms f;
  f.b = CVec::Zero(L);
  f.Q = CMat::Zero(L, L);
  for (int k = 0; k < ch.K(); ++k) {
    const UserQuadratics& q = quads[k];
    const double t = aux.tau(k);
    const Complex v = aux.upsilon(k);
    const double v2 = std::norm(v);
    const CVec uk = ch.f[k].cwiseProduct((ch.G * d.w[k]).conjugate());
    const Complex ck = ch.g[k].dot(d.w[k]);
    f.b += 2.0 * std::sqrt(1.0 + t) * v * uk - v2 * q.C2p;
    f.Q += v2 * (q.B2p + q.D);
    f.constant += std::log2(1.0 + t) - t + 2.0 * std::sqrt(1.0 + t) * (std::conj(v) * ck).real() -
                  v2 * q.A2p;
  }
  RVec pdiag = RVec::Constant(L, sigma_z2);
  pdiag += (ch.G * d.w0).cwiseAbs2();
  for (const auto& wk : d.w) pdiag += (ch.G * wk).cwiseAbs2();
  f.Pi = pdiag.cast<Complex>().asDiagonal();
  return f;
}

PsdSplit psd_split(const CMat& M, double zero_tol) {
  const CMat H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  const RVec& ev = es.eigenvalues();
  const CMat& V = es.eigenvectors();
  // Relative to the spectrum: channel-scale matrices have entries near 1e-20.
  const double tol = zero_tol * ev.cwiseAbs().maxCoeff();
  RVec pos = RVec::Zero(ev.size());
  RVec neg = RVec::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol) pos(i) = ev(i);
    if (ev(i) < -tol) neg(i) = -ev(i);
  }
  PsdSplit sp;
  sp.plus = V * pos.cast<Complex>().asDiagonal() * V.adjoint();
  sp.minus = V * neg.cast<Complex>().asDiagonal() * V.adjoint();
  sp.plus = 0.5 * (sp.plus + sp.plus.adjoint()).eval();
  sp.minus = 0.5 * (sp.minus + sp.minus.adjoint()).eval();
  return sp;
}

namespace {

struct QcqpStep {
  bool ok = false;
  CVec psi;
  std::string status;
};

// One convexified QCQP solve at psi0 with (tau, upsilon) tight at psi0.
QcqpStep qcqp_step(const ChannelSet& ch, const TransmitDesign& d, const CVec& psi0, bool active,
                   const ScenarioConfig& cfg, const RisUpdateOptions& opts) {
  const int K = ch.K();
  const int L = ch.L();
  const FpAuxiliaries aux = closed_form_aux(ch, psi0, d, cfg.sigma_z2, cfg.sigma_k2);
  std::vector<UserQuadratics> quads;
  for (int k = 0; k < K; ++k)
    quads.push_back(assemble_user_quadratics(ch, d, k, cfg.sigma_z2, cfg.sigma_k2));
  const ConstraintForms cons = constraint_forms(quads, d.r_c, cfg.R_min, opts.common_stream);
  const QcqpForms obj = objective_forms(quads, aux, ch, d, cfg.sigma_z2);

  // psi = c x keeps the solver variables O(1).
  double c = 1.0;
  if (active) c = std::sqrt(cfg.P_a_max / obj.Pi.real().trace());

  solver::ConvexProgram prog(2 * L);
  const solver::RealForm of = solver::real_embed(obj.Q, obj.b);
  // At high SINR the surrogate's coefficients grow with tau; the argmax is
  // unchanged by a positive rescaling of the objective.
  const double oscale =
      std::max({1.0, (c * c) * of.S.cwiseAbs().maxCoeff(), c * of.c.cwiseAbs().maxCoeff()});
  prog.objective.quadratic = -(c * c / oscale) * of.S;
  prog.objective.linear = (c / oscale) * of.c;
  prog.objective.constant = obj.constant / oscale;
  for (int k = 0; k < K; ++k) {
    const UserQuadratics& q = quads[k];
    // Both rate constraints are normalized by the total received power.
    const double den = hform(q.B2p + q.D, psi0) + reform(psi0, q.C2p) + q.A2p;
    if (!cons.priv[k].vacuous) {
      prog.constraints.emplace_back(restricted_rate_constraint(
          cons.priv[k], psi0, den, c, "private[" + std::to_string(k + 1) + "]"));
    }
    if (!cons.common.empty() && !cons.common[k].vacuous) {
      prog.constraints.emplace_back(restricted_rate_constraint(
          cons.common[k], psi0, den, c, "common[" + std::to_string(k + 1) + "]"));
    }
  }
  if (active) {
    const solver::RealForm pf = solver::real_embed(obj.Pi, CVec::Zero(L));
    solver::QuadraticConstraint qc;
    qc.P = solver::to_sparse((c * c / cfg.P_a_max) * pf.S);
    qc.q = RVec::Zero(2 * L);
    qc.r = -1.0;
    qc.name = "ris_power";
    prog.constraints.emplace_back(std::move(qc));
  } else {
    for (int l = 0; l < L; ++l) {
      std::vector<Eigen::Triplet<double>> trips{{l, l, 1.0}, {l + L, l + L, 1.0}};
      solver::QuadraticConstraint qc;
      qc.P.resize(2 * L, 2 * L);
      qc.P.setFromTriplets(trips.begin(), trips.end());
      qc.q = RVec::Zero(2 * L);
      qc.r = -1.0;
      qc.name = "modulus[" + std::to_string(l + 1) + "]";
      prog.constraints.emplace_back(std::move(qc));
    }
  }

  solver::SolverOptions so;
  so.tol = cfg.solver_tol;
  so.initial_point = solver::stack(psi0) / c;
  const solver::Solution sol = solver::solve(prog, so);
  QcqpStep st;
  st.status = solver::to_string(sol.status);
  st.ok = solver::usable(sol, so.tol);
  if (st.ok) st.psi = c * solver::unstack(sol.x);
  return st;
}

// RIS power is a homogeneous quadratic in psi: pull overshoots back radially
// to just inside the budget.
CVec cap_power(const ChannelSet& ch, const TransmitDesign& d, CVec psi, const ScenarioConfig& cfg) {
  const double pw = ris_power(ch, psi, d, cfg.sigma_z2);
  const double cap = (1.0 - 1e-9) * cfg.P_a_max;
  if (pw > cap) psi *= std::sqrt(cap / pw);
  return psi;
}

}  // namespace

RisUpdateResult ris_update(const ChannelSet& ch, const TransmitDesign& d, const RisVector& prev,
                           const ScenarioConfig& cfg, const RisUpdateOptions& opts) {
  RisUpdateResult res;
  res.ris = prev;
  const int L = ch.L();
  const bool active = prev.mode == RisMode::kActive;

  bool feasible = false;
  double R_cur = true_objective(ch, prev, d, cfg, &feasible);
  if (!feasible) {
    res.degraded = true;
    res.message = "previous point violates P0";
    return res;
  }
  auto score = [&](const CVec& psi, double* R) {
    RisVector r{psi, prev.mode};
    bool ok = false;
    *R = true_objective(ch, r, d, cfg, &ok);
    return ok;
  };

  for (int it = 1; it <= cfg.max_ris_inner; ++it) {
    const CVec psi0 = res.ris.psi;
    RisTraceRow row;
    row.iteration = it;
    const QcqpStep s1 = qcqp_step(ch, d, psi0, active, cfg, opts);
    row.status = s1.status;
    if (!s1.ok) {
      res.degraded = true;
      res.message = "subproblem " + s1.status;
      break;
    }

    CVec best = psi0;
    double R_best = R_cur + kAcceptGain;
    double R = 0.0;
    if (active) {
      // The QCQP map moves little per step at high SINR. Two steps give a
      // squared extrapolation (SQUAREM); every candidate is checked against
      // the true objective and P0.
      if (score(s1.psi, &R) && R > R_best) {
        best = s1.psi;
        R_best = R;
        const QcqpStep s2 = qcqp_step(ch, d, s1.psi, active, cfg, opts);
        if (s2.ok && score(s2.psi, &R) && R > R_best) {
          best = s2.psi;
          R_best = R;
          const CVec r = s1.psi - psi0;
          const CVec v = s2.psi - s1.psi - r;
          if (v.norm() > 0.0) {
            double a = std::min(-1.0, -r.norm() / v.norm());
            for (int tr = 0; tr < kExtrapolationTries && a < -1.0; ++tr, a = 0.5 * (a - 1.0)) {
              const CVec z = cap_power(ch, d, psi0 - 2.0 * a * r + a * a * v, cfg);
              if (score(z, &R) && R > R_best) {
                best = z;
                R_best = R;
                break;
              }
            }
          }
        }
      }
    } else {
      // Unit-modulus projections of points on the segment towards the QCQP
      // point, halving the step until one improves.
      double alpha = 1.0;
      for (int tr = 0; tr < kExtrapolationTries; ++tr, alpha *= 0.5) {
        const CVec z = psi0 + alpha * (s1.psi - psi0);
        CVec u(L);
        for (int l = 0; l < L; ++l) u(l) = std::abs(z(l)) > 1e-12 ? z(l) / std::abs(z(l)) : psi0(l);
        if (score(u, &R) && R > R_best) {
          best = u;
          R_best = R;
          break;
        }
      }
    }

    if (best == psi0) {
      row.status += ":rejected";
      row.sum_rate = R_cur;
      const FpAuxiliaries aux = closed_form_aux(ch, psi0, d, cfg.sigma_z2, cfg.sigma_k2);
      row.f2 = eval_f1_f2(ch, psi0, d, aux, cfg.sigma_z2, cfg.sigma_k2).f2;
      row.power = ris_power(ch, psi0, d, cfg.sigma_z2);
      res.trace.push_back(row);
      break;
    }
    res.ris.psi = best;
    res.changed = true;
    const double gain = R_best - R_cur;
    R_cur = R_best;
    const FpAuxiliaries tight = closed_form_aux(ch, best, d, cfg.sigma_z2, cfg.sigma_k2);
    row.f2 = eval_f1_f2(ch, best, d, tight, cfg.sigma_z2, cfg.sigma_k2).f2;
    row.sum_rate = R_cur;
    row.power = ris_power(ch, best, d, cfg.sigma_z2);
    res.trace.push_back(row);
    if (gain < cfg.eps_inner) break;
  }
  return res;
}

std::string ris_trace_csv(const std::vector<RisTraceRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,f2,sum_rate,power,status\n";
  for (const auto& r : rows)
    os << r.iteration << "," << r.f2 << "," << r.sum_rate << "," << r.power << "," << r.status
       << "\n";
  return os.str();
}

}  // namespace risrsma
