// SPDX-License-Identifier: Apache-2.0

#include "risrsma/self_check.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "risrsma/algorithm.hpp"
#include "risrsma/kkt_oracle.hpp"

namespace risrsma {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Direct evaluation from the channel entries.
struct Direct {
  const ChannelSet& ch;
  const CVec& psi;

  // h_k^H w = g_k^H w + sum_l conj(f_k,l) psi_l (G w)_l
  Complex hw(int k, const CVec& w) const {
    Complex acc = 0.0;
    for (int n = 0; n < ch.N_T(); ++n) acc += std::conj(ch.g[k](n)) * w(n);
    for (int l = 0; l < ch.L(); ++l) {
      Complex gw = 0.0;
      for (int n = 0; n < ch.N_T(); ++n) gw += ch.G(l, n) * w(n);
      acc += std::conj(ch.f[k](l)) * psi(l) * gw;
    }
    return acc;
  }
  double ris_noise(int k, double sz2) const {
    double acc = 0.0;
    for (int l = 0; l < ch.L(); ++l) acc += std::norm(ch.f[k](l)) * std::norm(psi(l));
    return sz2 * acc;
  }
  double ris_power(const TransmitDesign& d, double sz2) const {
    double acc = 0.0;
    for (int l = 0; l < ch.L(); ++l) {
      double in = sz2;
      for (int m = -1; m < d.K(); ++m) {
        const CVec& w = m < 0 ? d.w0 : d.w[m];
        Complex gw = 0.0;
        for (int n = 0; n < ch.N_T(); ++n) gw += ch.G(l, n) * w(n);
        in += std::norm(gw);
      }
      acc += std::norm(psi(l)) * in;
    }
    return acc;
  }
  // Private and common SINR of user k; the private one is after SIC.
  double gamma_p(int k, const TransmitDesign& d, const ScenarioConfig& c) const {
    double den = ris_noise(k, c.sigma_z2) + c.sigma_k2;
    for (int j = 0; j < d.K(); ++j)
      if (j != k) den += std::norm(hw(k, d.w[j]));
    return std::norm(hw(k, d.w[k])) / den;
  }
  double gamma_c(int k, const TransmitDesign& d, const ScenarioConfig& c) const {
    double den = ris_noise(k, c.sigma_z2) + c.sigma_k2;
    for (int j = 0; j < d.K(); ++j) den += std::norm(hw(k, d.w[j]));
    return std::norm(hw(k, d.w0)) / den;
  }
};

double hq(const CMat& M, const CVec& x) { return x.dot(M * x).real(); }
double lin(const CVec& x, const CVec& c) { return x.dot(c).real(); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Instance {
  ScenarioConfig cfg;
  ChannelSet ch;
  TransmitDesign d;
  CVec psi;
};

// Random beams using part of the BS budget and an active psi using part of
// the RIS budget.
Instance random_instance(int K, int N, int L, std::uint64_t seed) {
  Instance in;
  in.cfg.K = K;
  in.cfg.N_T = N;
  in.cfg.L = L;
  in.ch = generate_channels(in.cfg, seed);
  std::mt19937_64 rng(seed ^ 0x5e1fc4ecULL);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.2, 1.0);
  const auto cvec = [&](int n) {
    CVec v(n);
    for (auto& z : v) z = Complex(nd(rng), nd(rng));
    return v;
  };
  in.d = TransmitDesign::zeros(K, N);
  in.d.w0 = cvec(N);
  for (auto& w : in.d.w) w = cvec(N);
  const double s = std::sqrt(ud(rng) * in.cfg.P_bs_max / in.d.power());
  in.d.w0 *= s;
  for (auto& w : in.d.w) w *= s;
  in.psi = cvec(L);
  const Direct dir{in.ch, in.psi};
  in.psi *= std::sqrt(ud(rng) * in.cfg.P_a_max / dir.ris_power(in.d, in.cfg.sigma_z2));
  return in;
}

double residual(const solver::Constraint& c, const RVec& x) {
  if (const auto* l = std::get_if<solver::LinearConstraint>(&c)) return l->a.dot(x) - l->b;
  if (const auto* q = std::get_if<solver::QuadraticConstraint>(&c))
    return x.dot(q->P * x) + q->q.dot(x) + q->r;
  return 0.0;
}

std::string constraint_name(const solver::Constraint& c) {
  return std::visit([](const auto& v) { return v.name; }, c);
}

}  // namespace

CheckOutcome check_quadratic_forms(int instances, std::uint64_t seed, double tol) {
  const auto t0 = Clock::now();
  CheckOutcome out{"quadratic forms", false, 0.0, tol, 0.0, ""};
  for (int i = 0; i < instances; ++i) {
    const Instance in = random_instance(2, 4, 8, seed + i);
    const Direct dir{in.ch, in.psi};
    const auto& c = in.cfg;
    std::vector<UserQuadratics> quads;
    for (int k = 0; k < in.ch.K(); ++k) {
      const UserQuadratics q = assemble_user_quadratics(in.ch, in.d, k, c.sigma_z2, c.sigma_k2);
      const double sig = std::norm(dir.hw(k, in.d.w[k]));
      const double com = std::norm(dir.hw(k, in.d.w0));
      double interf = c.sigma_k2;
      for (int j = 0; j < in.ch.K(); ++j)
        if (j != k) interf += std::norm(dir.hw(k, in.d.w[j]));
      const double errs[] = {
          rel_err(q.A1p + hq(q.B1p, in.psi) + lin(in.psi, q.C1p), sig),
          rel_err(q.A1c + hq(q.B1c, in.psi) + lin(in.psi, q.C1c), com),
          rel_err(q.E + hq(q.F, in.psi) + lin(in.psi, q.J), interf),
          rel_err(hq(q.D, in.psi), dir.ris_noise(k, c.sigma_z2)),
          rel_err(q.A2p + hq(q.B2p, in.psi) + lin(in.psi, q.C2p), sig + interf),
      };
      for (double e : errs) out.measured = std::max(out.measured, e);
      quads.push_back(q);
    }
    const FpAuxiliaries aux = closed_form_aux(in.ch, in.psi, in.d, c.sigma_z2, c.sigma_k2);
    const QcqpForms of = objective_forms(quads, aux, in.ch, in.d, c.sigma_z2);
    out.measured = std::max(out.measured,
                            rel_err(hq(of.Pi, in.psi), dir.ris_power(in.d, c.sigma_z2)));
  }
  out.passed = out.measured <= tol;
  out.seconds = since(t0);
  out.detail = std::to_string(instances) + " instances, worst relative error";
  return out;
}

CheckOutcome check_fp_tightness(int instances, std::uint64_t seed, double tol) {
  const auto t0 = Clock::now();
  CheckOutcome out{"fp tightness", false, 0.0, tol, 0.0, ""};
  for (int i = 0; i < instances; ++i) {
    const Instance in = random_instance(2, 4, 8, seed + i);
    const Direct dir{in.ch, in.psi};
    double rate = 0.0;
    for (int k = 0; k < in.ch.K(); ++k) rate += std::log2(1.0 + dir.gamma_p(k, in.d, in.cfg));
    const FpAuxiliaries aux =
        closed_form_aux(in.ch, in.psi, in.d, in.cfg.sigma_z2, in.cfg.sigma_k2);
    const F12 f = eval_f1_f2(in.ch, in.psi, in.d, aux, in.cfg.sigma_z2, in.cfg.sigma_k2);
    const double scale = std::max(1.0, std::abs(rate));
    out.measured = std::max({out.measured, std::abs(f.f1 - rate) / scale,
                             std::abs(f.f2 - f.f1) / scale});
  }
  out.passed = out.measured <= tol;
  out.seconds = since(t0);
  out.detail = std::to_string(instances) + " instances, worst error relative to max(1, rate)";
  return out;
}

CheckOutcome check_constraint_equivalence(int instances, std::uint64_t seed, double band) {
  const auto t0 = Clock::now();
  CheckOutcome out{"constraint equivalence", false, 0.0, 0.0, 0.0, ""};
  std::mt19937_64 rng(seed ^ 0xc0ffeeULL);
  std::uniform_real_distribution<double> lu(std::log(0.25), std::log(4.0));
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  int held = 0, broken = 0, skipped = 0, disagree = 0;
  const auto compare = [&](double gamma, double thr, const RateConstraintForm& f, const CVec& psi) {
    if (std::abs(gamma - thr) <= band * std::max(std::abs(thr), gamma)) {
      ++skipped;
      return;
    }
    const bool raw = gamma >= thr;
    const bool form = f.vacuous || hq(f.M, psi) + lin(psi, f.N) - f.rhs >= 0.0;
    (raw ? held : broken)++;
    if (raw != form) ++disagree;
  };
  for (int i = 0; i < instances; ++i) {
    Instance in = random_instance(2, 4, 8, seed + i);
    const Direct dir{in.ch, in.psi};
    const int K = in.ch.K();
    RVec gp(K), gc(K);
    for (int k = 0; k < K; ++k) {
      gp(k) = dir.gamma_p(k, in.d, in.cfg);
      gc(k) = dir.gamma_c(k, in.d, in.cfg);
    }
    // Common total near the weaker user's common rate, private thresholds
    // near user 1's private rate, so both signs occur.
    const double total = std::log2(1.0 + gc.minCoeff() * std::exp(lu(rng)));
    const double frac = ud(rng);
    in.d.r_c = RVec(K);
    in.d.r_c(0) = frac * total;
    for (int k = 1; k < K; ++k) in.d.r_c(k) = (1.0 - frac) * total / (K - 1);
    const double R_min = in.d.r_c(0) + std::log2(1.0 + gp(0) * std::exp(lu(rng)));
    std::vector<UserQuadratics> quads;
    for (int k = 0; k < K; ++k)
      quads.push_back(assemble_user_quadratics(in.ch, in.d, k, in.cfg.sigma_z2, in.cfg.sigma_k2));
    const ConstraintForms cf = constraint_forms(quads, in.d.r_c, R_min, true);
    for (int k = 0; k < K; ++k) {
      compare(gp(k), std::exp2(R_min - in.d.r_c(k)) - 1.0, cf.priv[k], in.psi);
      compare(gc(k), std::exp2(in.d.r_c.sum()) - 1.0, cf.common[k], in.psi);
    }
  }
  out.measured = disagree;
  out.passed = disagree == 0 && held > 0 && broken > 0;
  out.seconds = since(t0);
  std::ostringstream os;
  os << instances << " triples: " << held << " held, " << broken << " violated, " << skipped
     << " in band, disagreements counted";
  out.detail = os.str();
  return out;
}

CheckOutcome check_sca_surrogates(int instances, int samples, std::uint64_t seed, double tol) {
  const auto t0 = Clock::now();
  CheckOutcome out{"sca surrogates", false, 0.0, tol, 0.0, ""};
  std::mt19937_64 rng(seed ^ 0x5ca5ca5ULL);
  std::uniform_real_distribution<double> lu(-3.0, 3.0);
  std::normal_distribution<double> nd;
  double tight = 0.0;
  long unsafe = 0;
  for (int i = 0; i < instances; ++i) {
    const Instance in = random_instance(2, 4, 8, seed + i);
    RisVector ris{in.psi, RisMode::kActive};
    TransmitDesign d = in.d;
    d.r_c = RVec::Zero(in.ch.K());
    const ScaAuxiliaries aux = tight_auxiliaries(in.ch, in.psi, d, in.cfg);
    for (int k = 0; k < in.ch.K(); ++k) {
      const double b0 = aux.beta(k), x0 = aux.xi(k), l0 = aux.lambda(k), k0 = aux.kappa(k);
      const Complex a0 = equivalent_channel(in.ch, in.psi, k).dot(d.w0);
      tight = std::max({tight, rel_err(taylor_sqrt_bound(b0, x0, b0, x0), std::sqrt(b0 * x0)),
                        rel_err(dc_product_bound(l0, k0, l0, k0), l0 * k0),
                        rel_err(dc_power_minorant(a0, a0), std::norm(a0))});
      for (int s = 0; s < samples; ++s) {
        const double b = b0 * std::exp(lu(rng)), x = x0 * std::exp(lu(rng));
        const double l = l0 * std::exp(lu(rng)), kk = k0 * std::exp(lu(rng));
        const Complex a = a0 * std::exp(lu(rng)) + std::abs(a0) * Complex(nd(rng), nd(rng));
        const double slack = 1e-12;
        if (taylor_sqrt_bound(b, x, b0, x0) < std::sqrt(b * x) * (1.0 - slack)) ++unsafe;
        if (dc_product_bound(l, kk, l0, k0) < l * kk * (1.0 - slack)) ++unsafe;
        if (dc_power_minorant(a, a0) > std::norm(a) + slack * std::norm(a0)) ++unsafe;
      }
    }
    // The surrogate rows of the built subproblem are active at its expansion point.
    const ScaSubproblem sub = build_subproblem(in.ch, ris, d, aux, in.cfg, ScaOptions{true});
    for (const auto& c : sub.program.constraints) {
      const std::string name = constraint_name(c);
      for (const char* fam : {"private_sinr[", "common_sinr[", "interference[", "received_power["})
        if (name.rfind(fam, 0) == 0) tight = std::max(tight, std::abs(residual(c, sub.x0)));
    }
  }
  out.measured = tight;
  out.passed = tight <= tol && unsafe == 0;
  out.seconds = since(t0);
  std::ostringstream os;
  os << instances << " instances x " << samples << " samples; worst tightness error, " << unsafe
     << " unsafe samples";
  out.detail = os.str();
  return out;
}

CheckOutcome check_single_user_mrt(int instances, std::uint64_t seed, double tol) {
  const auto t0 = Clock::now();
  CheckOutcome out{"single-user MRT", false, 0.0, tol, 0.0, ""};
  bool all_ok = true;
  for (int i = 0; i < instances; ++i) {
    ScenarioConfig c;
    c.K = 1;
    c.L = 8;
    const ChannelSet ch = generate_channels(c, seed + i);
    const RisVector ris{CVec::Zero(c.L), RisMode::kActive};
    const ScaOptions so{false};
    const InitResult init = init_point(ch, ris, c, so);
    if (!init.feasible) {
      all_ok = false;
      continue;
    }
    const ScaResult sr = sca_solve(ch, ris, init.design, c, so);
    const RateReport rep = evaluate(ch, ris, sr.design, c);
    all_ok = all_ok && rep.feasible;
    const double mrt = std::log2(1.0 + c.P_bs_max * ch.g[0].squaredNorm() / c.sigma_k2);
    out.measured = std::max(out.measured, std::abs(rep.sum_rate - mrt));
  }
  out.passed = all_ok && out.measured <= tol;
  out.seconds = since(t0);
  out.detail = std::to_string(instances) + " seeds, worst |R - log2(1 + P|g|^2/sigma^2)|";
  return out;
}

CheckOutcome check_ris_grid(int instances, int grid_side, std::uint64_t seed, double rel_tol) {
  const auto t0 = Clock::now();
  CheckOutcome out{"single-element RIS grid", false, -1.0, rel_tol, 0.0, ""};
  bool all_ok = true;
  for (int i = 0; i < instances; ++i) {
    ScenarioConfig c;
    c.K = 1;
    c.L = 1;
    c.max_ris_inner = 200;
    c.eps_inner = 1e-10;
    const ChannelSet ch = generate_channels(c, seed + i);
    const RisVector ris0 = initial_ris(ch, c, RisMode::kActive, seed + i);
    const ScaOptions so{false};
    const InitResult init = init_point(ch, ris0, c, so);
    if (!init.feasible) {
      all_ok = false;
      continue;
    }
    const TransmitDesign& d = init.design;
    const RisUpdateResult rr = ris_update(ch, d, ris0, c, RisUpdateOptions{false});
    const RateReport rep = evaluate(ch, rr.ris, d, c);
    all_ok = all_ok && rep.feasible;

    Complex gw = 0.0, Gw = 0.0;
    for (int n = 0; n < c.N_T; ++n) {
      gw += std::conj(ch.g[0](n)) * d.w[0](n);
      Gw += ch.G(0, n) * d.w[0](n);
    }
    const double f2 = std::norm(ch.f[0](0));
    const double amp_max = std::sqrt(c.P_a_max / (std::norm(Gw) + c.sigma_z2));
    double best = -1.0;
    for (int a = 0; a < grid_side; ++a) {
      const double amp = amp_max * a / (grid_side - 1);
      for (int p = 0; p < grid_side; ++p) {
        const Complex psi = std::polar(amp, 2.0 * std::numbers::pi * p / grid_side);
        const Complex hw = gw + std::conj(ch.f[0](0)) * psi * Gw;
        const double rate =
            std::log2(1.0 + std::norm(hw) / (c.sigma_z2 * f2 * std::norm(psi) + c.sigma_k2));
        if (rate >= c.R_min) best = std::max(best, rate);
      }
    }
    out.measured = std::max(out.measured, (best - rep.sum_rate) / best);
  }
  out.passed = all_ok && out.measured <= rel_tol;
  out.seconds = since(t0);
  out.detail = std::to_string(instances) + " instances, " + std::to_string(grid_side * grid_side) +
               "-point grid, worst relative shortfall (negative: update beats grid)";
  return out;
}

CheckOutcome check_solver_kkt(int instances, std::uint64_t seed, double kkt_tol, double ball_tol) {
  const auto t0 = Clock::now();
  CheckOutcome out{"solver KKT", false, 0.0, kkt_tol, 0.0, ""};
  std::mt19937_64 rng(seed);
  bool statuses = true;
  for (int t = 0; t < instances; ++t) {
    const int n = 2 + (t * 7) % 31;
    const oracle::RawQcqp raw = oracle::random_qcqp(rng, n, 1 + t % 4, t % 3);
    const solver::Solution s = solver::solve(oracle::to_program(raw));
    statuses = statuses && s.status == solver::SolveStatus::kOptimal;
    out.measured = std::max(out.measured, oracle::check_kkt(raw, s.x, s.duals).worst());
  }
  std::normal_distribution<double> nd;
  double ball = 0.0;
  for (int t = 0; t < 5; ++t) {
    const int n = 3 + 5 * t;
    RVec cvec(n);
    for (int i = 0; i < n; ++i) cvec(i) = nd(rng);
    solver::ConvexProgram p(n);
    p.objective.linear = cvec;
    solver::QuadraticConstraint qc;
    qc.P = solver::to_sparse(RMat::Identity(n, n));
    qc.q = RVec::Zero(n);
    qc.r = -1.0;
    p.constraints.emplace_back(qc);
    const solver::Solution s = solver::solve(p);
    statuses = statuses && s.status == solver::SolveStatus::kOptimal;
    ball = std::max(ball, std::abs(s.objective_value - cvec.norm()));
  }
  out.passed = statuses && out.measured <= kkt_tol && ball <= ball_tol;
  out.seconds = since(t0);
  std::ostringstream os;
  os << instances << " QCQPs, worst KKT residual; ball LP worst |value - ||c||| = " << ball
     << " (limit " << ball_tol << ")";
  out.detail = os.str();
  return out;
}

std::vector<CheckOutcome> run_self_checks(int instances, std::uint64_t seed) {
  const int few = std::max(1, instances / 10);
  return {check_quadratic_forms(instances, seed),
          check_fp_tightness(instances, seed),
          check_constraint_equivalence(instances, seed),
          check_sca_surrogates(few, 10000, seed),
          check_single_user_mrt(few, seed),
          check_ris_grid(few, 100, seed),
          check_solver_kkt(std::min(instances, 20), seed)};
}

std::string format_outcome(const CheckOutcome& c) {
  std::ostringstream os;
  os.precision(3);
  os << (c.passed ? "PASS" : "FAIL") << "  " << c.name << ": measured " << c.measured
     << " (limit " << c.threshold << "), " << c.detail << ", " << std::fixed << c.seconds << " s";
  return os.str();
}

}  // namespace risrsma
