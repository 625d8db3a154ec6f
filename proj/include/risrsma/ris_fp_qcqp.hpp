// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "risrsma/rsma_rates.hpp"

// RIS step of the alternating algorithm: fractional-programming transforms of
// the private sum rate, per-user quadratic forms in psi, and the convexified
// QCQP solved for psi with the beams fixed.
namespace risrsma {

struct FpAuxiliaries {
  RVec tau;
  CVec upsilon;
};

// Per-user quadratic forms in psi. With u_i = f_k .* conj(G w_i) and
// c_i = g_k^H w_i, h_k^H w_i = c_i + u_i^H psi.
struct UserQuadratics {
  double A1p = 0.0, A1c = 0.0;
  CMat B1p, B1c;
  CVec C1p, C1c;
  CMat D;  // sigma_z^2 diag(|f_k,l|^2)
  double E = 0.0;
  double A2p = 0.0;
  CMat F;
  CMat B2p;
  CVec J;
  CVec C2p;
};

// psi^H M psi + Re(psi^H N) >= rhs. `vacuous` marks a zero threshold, where
// the constraint holds for every psi and is left out of the QCQP.
struct RateConstraintForm {
  CMat M;
  CVec N;
  double rhs = 0.0;
  double threshold = 0.0;  // SINR level the form encodes
  bool vacuous = false;
};

struct ConstraintForms {
  std::vector<RateConstraintForm> priv;
  std::vector<RateConstraintForm> common;
};

// f2(psi) = Re(psi^H b) - psi^H Q psi + constant for fixed (tau, upsilon).
struct QcqpForms {
  CVec b;
  CMat Q;
  CMat Pi;  // psi^H Pi psi is the RIS power
  double constant = 0.0;
};

struct F12 {
  double f1 = 0.0;
  double f2 = 0.0;
};

FpAuxiliaries closed_form_aux(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
                              double sigma_z2, double sigma_k2);

// f1 with tau only, f2 with (tau, upsilon).
F12 eval_f1_f2(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
               const FpAuxiliaries& aux, double sigma_z2, double sigma_k2);

UserQuadratics assemble_user_quadratics(const ChannelSet& ch, const TransmitDesign& d, int k,
                                        double sigma_z2, double sigma_k2);

ConstraintForms constraint_forms(const std::vector<UserQuadratics>& quads, const RVec& r_c,
                                 double R_min, bool common_stream = true);

QcqpForms objective_forms(const std::vector<UserQuadratics>& quads, const FpAuxiliaries& aux,
                          const ChannelSet& ch, const TransmitDesign& d, double sigma_z2);

// M = Mplus - Mminus with both parts PSD. Eigenvalues within
// zero_tol * max|eigenvalue| of zero are dropped.
struct PsdSplit {
  CMat plus;
  CMat minus;
};
PsdSplit psd_split(const CMat& M, double zero_tol = 1e-10);

struct RisTraceRow {
  int iteration = 0;
  double f2 = 0.0;        // at the tight (tau, upsilon) of the accepted psi
  double sum_rate = 0.0;  // true objective with r_c fixed
  double power = 0.0;
  std::string status;
};

struct RisUpdateOptions {
  bool common_stream = true;
};

struct RisUpdateResult {
  RisVector ris;
  std::vector<RisTraceRow> trace;
  bool changed = false;
  bool degraded = false;  // a subproblem failed; the last accepted psi is returned
  std::string message;
};

// Requires (design, psi_prev) feasible for P0. Never returns a point with a
// lower objective or a P0 violation.
RisUpdateResult ris_update(const ChannelSet& ch, const TransmitDesign& d, const RisVector& prev,
                           const ScenarioConfig& cfg, const RisUpdateOptions& opts = {});

std::string ris_trace_csv(const std::vector<RisTraceRow>& rows);

}  // namespace risrsma
