// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Sparse>

#include "risrsma/types.hpp"

// Structured convex programs over real variables and the interior-point
// solver that handles them. Every complex quadratic form used elsewhere in the
// library reaches the solver through real_embed().
namespace risrsma::solver {

enum class Sense { kLessEqual, kEqual };

// a'x <= b, or a'x == b.
struct LinearConstraint {
  RVec a;
  double b = 0.0;
  Sense sense = Sense::kLessEqual;
  std::string name;
};

// x'Px + q'x + r <= 0 with P symmetric positive semidefinite.
struct QuadraticConstraint {
  Eigen::SparseMatrix<double> P;
  RVec q;
  double r = 0.0;
  std::string name;
};

// ||Ax + b|| <= c'x + d.
struct SecondOrderConeConstraint {
  RMat A;
  RVec b;
  RVec c;
  double d = 0.0;
  std::string name;
};

// 2^(a'x + b) <= c'x + d.
struct ExpConstraint {
  RVec a;
  double b = 0.0;
  RVec c;
  double d = 0.0;
  std::string name;
};

// e'x + f <= log2(1 + a'x + b).
struct LogConstraint {
  RVec e;
  double f = 0.0;
  RVec a;
  double b = 0.0;
  std::string name;
};

using Constraint = std::variant<LinearConstraint, QuadraticConstraint,
                                SecondOrderConeConstraint, ExpConstraint,
                                LogConstraint>;

// weight * log2(1 + a'x + b), weight >= 0.
struct LogTerm {
  double weight = 1.0;
  RVec a;
  double b = 0.0;
};

// Maximized: linear'x + x'Qx + constant + sum of log terms. Q must be
// negative semidefinite; an empty (0x0) Q means no quadratic term.
struct Objective {
  RVec linear;
  RMat quadratic;
  double constant = 0.0;
  std::vector<LogTerm> log_terms;
};

struct ConvexProgram {
  explicit ConvexProgram(int num_vars = 0);

  int n = 0;
  Objective objective;
  std::vector<Constraint> constraints;
  // Per-variable bounds; +-infinity where absent.
  RVec lower;
  RVec upper;

  int num_constraints() const { return static_cast<int>(constraints.size()); }

  // Throws std::invalid_argument on dimension/symmetry problems and
  // ConvexityError when a declared-convex term is not.
  void validate() const;

  double evaluate_objective(const RVec& x) const;
};

class ConvexityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SolveStatus { kOptimal, kMaxIter, kInfeasible, kNumericalFailure };

const char* to_string(SolveStatus status);

struct Solution {
  RVec x;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::kNumericalFailure;
  double kkt_residual = 0.0;
  double primal_residual = 0.0;
  // One multiplier per entry of ConvexProgram::constraints. Inequalities carry
  // lambda >= 0 for the constraint written as f(x) <= 0 (for cones, the
  // multiplier of ||Ax+b|| - c'x - d); equalities carry their free
  // multiplier for a'x - b = 0.
  RVec duals;
  RVec lower_duals;
  RVec upper_duals;
  int newton_iterations = 0;
  std::string message;
};

struct SolverOptions {
  double tol = 1e-6;
  int max_newton_steps = 1500;
  // Starting point for phase I. Must lie in the domain of every log term.
  RVec initial_point;
};

Solution solve(const ConvexProgram& program, const SolverOptions& options = {});

// A finite, primal-feasible iterate, including one returned after a stall
// short of the KKT tolerance. Callers that re-validate candidates against
// their own problem may use such points.
bool usable(const Solution& solution, double tol);

// Residual of the first-order optimality conditions of `program` at
// (solution.x, solution multipliers), using the same normalization the solver
// reports in Solution::kkt_residual.
double kkt_residual(const ConvexProgram& program, const Solution& solution);

// psi = u + i v  <->  [u; v].
RVec stack(const CVec& z);
CVec unstack(const RVec& x);

struct RealForm {
  RMat S;
  RVec c;
};

// For psi = u + i v: psi^H H psi = [u;v]' S [u;v] and Re(psi^H c) = c_r'[u;v].
RealForm real_embed(const CMat& H, const CVec& c);

Eigen::SparseMatrix<double> to_sparse(const RMat& dense, double drop_tol = 0.0);

// Human-readable listing of a program, for offline inspection.
void dump(const ConvexProgram& program, std::ostream& os);

}  // namespace risrsma::solver
