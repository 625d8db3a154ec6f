// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "risrsma/convex_program.hpp"
#include "risrsma/rsma_rates.hpp"

// Beamforming step: joint (w, r_c) update for fixed psi by successive convex
// approximation. Inside the subproblem the beams are normalized by sqrt(P_bs)
// and each user's channel by its total received power (signal plus noise) at
// the expansion point, so the slacks beta, lambda stay near 1 and SINRs are
// unchanged. The xi and beta slacks are further divided by their expansion
// values. ScaAuxiliaries themselves are in units of the noise power.
namespace risrsma {

struct ScaAuxiliaries {
  RVec xi;      // private SINR lower bounds
  RVec kappa;   // common SINR lower bounds
  RVec beta;    // private interference-plus-noise upper bounds
  RVec lambda;  // total received power upper bounds
};

struct ScaOptions {
  bool common_stream = true;  // false: w0 = 0, r_c = 0 (SDMA)
};

struct InitResult {
  TransmitDesign design;
  ScaAuxiliaries aux;
  bool feasible = false;
  std::string message;
};

InitResult init_point(const ChannelSet& ch, const RisVector& ris, const ScenarioConfig& cfg,
                      const ScaOptions& opts = {});

// Auxiliaries that make the slack definitions hold with equality at `d`.
ScaAuxiliaries tight_auxiliaries(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
                                 const ScenarioConfig& cfg);

// Right side of the private-SINR surrogate: first-order expansion of
// sqrt(beta xi) at (beta0, xi0). Never below sqrt(beta xi).
double taylor_sqrt_bound(double beta, double xi, double beta0, double xi0);
// Convex upper bound of lambda kappa, tight at (lambda0, kappa0).
double dc_product_bound(double lambda, double kappa, double lambda0, double kappa0);
// Affine lower bound of |a|^2, tight at a0.
double dc_power_minorant(Complex a, Complex a0);

struct ScaLayout {
  int K = 0;
  int N_T = 0;
  bool common = true;
  int n = 0;
  int beam(int m) const;  // m = 0 common, 1..K private; offset of [Re w; Im w]
  int rc(int k) const;
  int xi(int k) const;
  int beta(int k) const;
  int kappa(int k) const;
  int lambda(int k) const;
};

struct ScaSubproblem {
  solver::ConvexProgram program;
  ScaLayout layout;
  RVec x0;               // expansion point in solver variables
  double power_scale = 1.0;   // w = power_scale * w_hat
  RVec xi_scale;              // xi = xi_scale .* x(xi)
  RVec beta_scale;            // beta = beta_scale .* x(beta), in units of lambda0
  std::vector<CVec> h_hat;    // normalized equivalent channels
  TransmitDesign expansion;   // rotated design the surrogates are built at
};

// Throws std::domain_error when xi0 or beta0 is not positive.
ScaSubproblem build_subproblem(const ChannelSet& ch, const RisVector& ris,
                               const TransmitDesign& prev, const ScaAuxiliaries& aux,
                               const ScenarioConfig& cfg, const ScaOptions& opts = {});

TransmitDesign extract_design(const ScaSubproblem& sub, const RVec& x);

struct ScaTraceRow {
  int iteration = 0;
  double surrogate_objective = 0.0;
  double true_objective = 0.0;
  double max_residual = 0.0;
  std::string status;
  int newton_iterations = 0;
};

struct ScaResult {
  TransmitDesign design;
  std::vector<ScaTraceRow> trace;
  bool degraded = false;
  std::string message;
};

// Requires `init` feasible for P0 at the given psi.
ScaResult sca_solve(const ChannelSet& ch, const RisVector& ris, const TransmitDesign& init,
                    const ScenarioConfig& cfg, const ScaOptions& opts = {});

std::string sca_trace_csv(const std::vector<ScaTraceRow>& rows);

}  // namespace risrsma
