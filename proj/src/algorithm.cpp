// SPDX-License-Identifier: Apache-2.0

#include "risrsma/algorithm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace risrsma {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::kActiveRsma: return "active-rsma";
    case Scheme::kPassiveRsma: return "passive-rsma";
    case Scheme::kActiveSdma: return "active-sdma";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  for (Scheme s : all_schemes())
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::vector<Scheme> all_schemes() {
  return {Scheme::kActiveRsma, Scheme::kPassiveRsma, Scheme::kActiveSdma};
}

ScenarioConfig scheme_config(const ScenarioConfig& cfg, Scheme s) {
  ScenarioConfig c = cfg;
  if (s == Scheme::kPassiveRsma) c.P_bs_max = cfg.P_bs_max + cfg.P_a_max;
  return c;
}

RisVector initial_ris(const ChannelSet& ch, const ScenarioConfig& cfg, RisMode mode,
                      std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x52495321u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
  RisVector r;
  r.mode = mode;
  r.psi.resize(ch.L());
  double amp = 1.0;
  if (mode == RisMode::kActive) {
    Eigen::JacobiSVD<CMat> svd(ch.G);
    const double g2 = std::pow(svd.singularValues()(0), 2);
    amp = std::sqrt(0.5 * cfg.P_a_max / (g2 * cfg.P_bs_max + ch.L() * cfg.sigma_z2));
  }
  for (int l = 0; l < ch.L(); ++l) r.psi(l) = std::polar(amp, ud(rng));
  return r;
}

namespace {

// With psi moved and r_c held, the common-rate shares can sit up to the
// feasibility tolerance above the new common capacity. The exact allocation
// is kept when it is feasible and loses no more than that excess.
void reallocate_common_rate(const ChannelSet& ch, const ScenarioConfig& cfg, const RisVector& ris,
                            TransmitDesign* d, RateReport* rep) {
  const auto rc = allocate_common_rate(sinrs(ch, ris.psi, *d, cfg.sigma_z2, cfg.sigma_k2), cfg.R_min, 1e-12);
  if (!rc) return;
  const double excess = std::max(0.0, d->r_c.sum() - rep->R_c.minCoeff());
  TransmitDesign cand = *d;
  cand.r_c = *rc;
  const RateReport crep = evaluate(ch, ris, cand, cfg);
  if (crep.feasible && crep.sum_rate >= rep->sum_rate - excess - 1e-10) {
    *d = cand;
    *rep = crep;
  }
}

}  // namespace

RunResult run_algorithm1(const ChannelSet& ch, const ScenarioConfig& cfg, Scheme scheme,
                         const RisVector& ris0) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  res.scheme = scheme;
  res.seed = cfg.seed;
  const ScaOptions sopts{scheme != Scheme::kActiveSdma};
  const RisUpdateOptions ropts{sopts.common_stream};

  RisVector ris = ris0;
  const InitResult init = init_point(ch, ris, cfg, sopts);
  TransmitDesign d = init.design;
  res.design = d;
  res.ris = ris;
  if (!init.feasible) {
    res.status = "infeasible start: " + init.message;
    res.final_report = evaluate(ch, ris, d, cfg);
    return res;
  }
  RateReport rep = evaluate(ch, ris, d, cfg);
  res.initial_sum_rate = rep.sum_rate;
  double prev = rep.sum_rate;
  bool all_feasible = true;
  for (int t = 1; t <= cfg.max_outer; ++t) {
    const ScaResult sr = sca_solve(ch, ris, d, cfg, sopts);
    d = sr.design;
    const RisUpdateResult rr = ris_update(ch, d, ris, cfg, ropts);
    ris = rr.ris;
    rep = evaluate(ch, ris, d, cfg);
    if (sopts.common_stream) reallocate_common_rate(ch, cfg, ris, &d, &rep);
    int joint = 0;
    if (cfg.joint_refinement && cfg.max_joint_inner > 0 && rep.feasible) {
      const JointRefineResult jr =
          joint_refine(ch, cfg, d, ris, {sopts.common_stream, cfg.max_joint_inner});
      if (jr.changed) {
        d = jr.design;
        ris = jr.ris;
        rep = evaluate(ch, ris, d, cfg);
        joint = jr.iterations;
      }
    }

    OuterIterate oi;
    oi.iteration = t;
    oi.sum_rate = rep.sum_rate;
    oi.feasible = rep.feasible;
    oi.max_violation = rep.max_violation();
    oi.sca_iterations = static_cast<int>(sr.trace.size());
    oi.ris_iterations = static_cast<int>(rr.trace.size());
    oi.joint_iterations = joint;
    oi.status = sr.degraded ? "sca:" + sr.message : "ok";
    if (rr.degraded) oi.status += "; ris:" + rr.message;
    res.trace.push_back(oi);
    all_feasible = all_feasible && rep.feasible;
    res.iterations = t;
    if (std::abs(rep.sum_rate - prev) <= cfg.eps_outer) {
      res.converged = true;
      break;
    }
    prev = rep.sum_rate;
  }
  res.design = d;
  res.ris = ris;
  res.final_report = rep;
  res.sum_rate = rep.sum_rate;
  res.ok = all_feasible;
  res.status = !all_feasible ? "iterate failed feasibility recheck"
               : res.converged ? "converged"
                               : "max_outer reached";
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

bool invariants_hold(const RunResult& r, double slack) {
  if (!r.ok || !r.final_report.feasible) return false;
  double prev = r.initial_sum_rate;
  for (const auto& it : r.trace) {
    if (!it.feasible || it.sum_rate < prev - slack) return false;
    prev = it.sum_rate;
  }
  return true;
}

RunResult run_algorithm1(const ScenarioConfig& cfg, Scheme scheme, std::uint64_t seed) {
  ScenarioConfig c = scheme_config(cfg, scheme);
  c.seed = seed;
  const ChannelSet ch = generate_channels(c, seed);
  const RisMode mode = scheme == Scheme::kPassiveRsma ? RisMode::kPassive : RisMode::kActive;
  return run_algorithm1(ch, c, scheme, initial_ris(ch, c, mode, seed));
}

}  // namespace risrsma
