// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Oracle suites run by `risrsma validate` and the acceptance binary. Every
// oracle evaluates SINR terms, rates and optimality conditions directly from
// the raw channels and program data, not through the code it checks.
namespace risrsma {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst error or violation count
  double threshold = 0.0;  // pass limit for `measured`
  double seconds = 0.0;
  std::string detail;
};

// Quadratic forms of assemble_user_quadratics (and the RIS power form)
// against direct evaluation; worst relative error.
CheckOutcome check_quadratic_forms(int instances, std::uint64_t seed, double tol = 1e-9);

// f1 at tau* against the private sum rate and f2 at upsilon* against f1.
CheckOutcome check_fp_tightness(int instances, std::uint64_t seed, double tol = 1e-9);

// Sign agreement of the RIS rate-constraint forms with the raw SINR
// inequalities; measured is the number of disagreements outside the band.
CheckOutcome check_constraint_equivalence(int instances, std::uint64_t seed, double band = 1e-9);

// Taylor/DC bounds of the beamforming step: tight at the expansion point and
// on the safe side on random samples; also the tightness of the built
// subproblem's surrogate rows at its expansion point.
CheckOutcome check_sca_surrogates(int instances, int samples, std::uint64_t seed,
                                  double tol = 1e-9);

// K = 1, psi = 0, no common stream: beamforming step against the MRT rate.
CheckOutcome check_single_user_mrt(int instances, std::uint64_t seed, double tol = 1e-3);

// L = 1, K = 1: ris_update against a phase x magnitude grid search.
CheckOutcome check_ris_grid(int instances, int grid_side, std::uint64_t seed, double rel_tol = 1e-2);

// Random convex QCQPs with an independent KKT evaluator, plus the ball LP.
CheckOutcome check_solver_kkt(int instances, std::uint64_t seed, double kkt_tol = 1e-6,
                              double ball_tol = 1e-8);

// All of the above at the given instance count (samples for the surrogate
// check scale with it).
std::vector<CheckOutcome> run_self_checks(int instances, std::uint64_t seed);

std::string format_outcome(const CheckOutcome& c);

}  // namespace risrsma
