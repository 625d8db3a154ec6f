// SPDX-License-Identifier: Apache-2.0

#include "risrsma/convex_program.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace risrsma::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ConvexProgram: " + what);
}

// Smallest eigenvalue of the principal submatrix spanned by the rows that
// carry nonzeros. Zero rows do not affect definiteness.
double min_eigenvalue_on_support(const RMat& M) {
  std::vector<int> support;
  for (int i = 0; i < M.rows(); ++i) {
    if (M.row(i).cwiseAbs().maxCoeff() > 0.0) support.push_back(i);
  }
  if (support.empty()) return 0.0;
  const int m = static_cast<int>(support.size());
  RMat sub(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sub(i, j) = M(support[i], support[j]);
  Eigen::SelfAdjointEigenSolver<RMat> es(sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_psd(const RMat& M, const std::string& what) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  require((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * scale,
          what + " is not symmetric");
  const double lmin = min_eigenvalue_on_support(M);
  if (lmin < -1e-9 * scale) {
    std::ostringstream msg;
    msg << "ConvexProgram: " << what
        << " is not positive semidefinite (min eigenvalue " << lmin << ")";
    throw ConvexityError(msg.str());
  }
}

}  // namespace

ConvexProgram::ConvexProgram(int num_vars)
    : n(num_vars),
      lower(RVec::Constant(num_vars, -kInf)),
      upper(RVec::Constant(num_vars, kInf)) {
  objective.linear = RVec::Zero(num_vars);
}

void ConvexProgram::validate() const {
  require(n >= 0, "negative variable count");
  require(objective.linear.size() == n, "objective linear term has wrong size");
  require(lower.size() == n && upper.size() == n, "bounds have wrong size");
  for (int i = 0; i < n; ++i) require(lower(i) <= upper(i), "empty bound box");
  if (objective.quadratic.size() > 0) {
    require(objective.quadratic.rows() == n && objective.quadratic.cols() == n,
            "objective quadratic term has wrong size");
    check_psd(-objective.quadratic, "negated objective quadratic term");
  }
  for (const auto& t : objective.log_terms) {
    require(t.a.size() == n, "log term has wrong size");
    require(t.weight >= 0.0, "log term weight must be nonnegative");
  }
  for (const auto& c : constraints) {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, LinearConstraint>) {
            require(k.a.size() == n, "linear constraint '" + k.name + "' size");
          } else if constexpr (std::is_same_v<T, QuadraticConstraint>) {
            require(k.P.rows() == n && k.P.cols() == n && k.q.size() == n,
                    "quadratic constraint '" + k.name + "' size");
            check_psd(RMat(k.P), "quadratic constraint '" + k.name + "' matrix");
          } else if constexpr (std::is_same_v<T, SecondOrderConeConstraint>) {
            require(k.A.cols() == n && k.A.rows() == k.b.size() && k.c.size() == n,
                    "cone constraint '" + k.name + "' size");
          } else if constexpr (std::is_same_v<T, ExpConstraint>) {
            require(k.a.size() == n && k.c.size() == n,
                    "exp constraint '" + k.name + "' size");
          } else {
            require(k.e.size() == n && k.a.size() == n,
                    "log constraint '" + k.name + "' size");
          }
        },
        c);
  }
}

double ConvexProgram::evaluate_objective(const RVec& x) const {
  double v = objective.linear.dot(x) + objective.constant;
  if (objective.quadratic.size() > 0) v += x.dot(objective.quadratic * x);
  for (const auto& t : objective.log_terms)
    v += t.weight * std::log2(1.0 + t.a.dot(x) + t.b);
  return v;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

RVec stack(const CVec& z) {
  RVec x(2 * z.size());
  x.head(z.size()) = z.real();
  x.tail(z.size()) = z.imag();
  return x;
}

CVec unstack(const RVec& x) {
  const Eigen::Index m = x.size() / 2;
  CVec z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = Complex(x(i), x(i + m));
  return z;
}

RealForm real_embed(const CMat& H, const CVec& c) {
  if (H.rows() != H.cols() || H.rows() != c.size()) {
    throw std::invalid_argument("real_embed: dimension mismatch");
  }
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("real_embed: matrix is not Hermitian");
  }
  const Eigen::Index m = H.rows();
  RealForm f;
  f.S.resize(2 * m, 2 * m);
  f.S.topLeftCorner(m, m) = H.real();
  f.S.topRightCorner(m, m) = -H.imag();
  f.S.bottomLeftCorner(m, m) = H.imag();
  f.S.bottomRightCorner(m, m) = H.real();
  // Symmetrize away the round-off of a nearly Hermitian input.
  f.S = 0.5 * (f.S + f.S.transpose()).eval();
  f.c = stack(c);
  return f;
}

Eigen::SparseMatrix<double> to_sparse(const RMat& dense, double drop_tol) {
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index j = 0; j < dense.cols(); ++j)
    for (Eigen::Index i = 0; i < dense.rows(); ++i)
      if (std::abs(dense(i, j)) > drop_tol) trips.emplace_back(i, j, dense(i, j));
  Eigen::SparseMatrix<double> s(dense.rows(), dense.cols());
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

void dump(const ConvexProgram& p, std::ostream& os) {
  const Eigen::IOFormat row(Eigen::FullPrecision, Eigen::DontAlignCols, " ", " ");
  os << "variables " << p.n << "\n";
  os << "maximize\n  linear " << p.objective.linear.transpose().format(row) << "\n";
  os << "  constant " << p.objective.constant << "\n";
  if (p.objective.quadratic.size() > 0)
    os << "  quadratic_nnz " << (p.objective.quadratic.array() != 0.0).count() << "\n";
  for (const auto& t : p.objective.log_terms)
    os << "  log2term weight " << t.weight << " b " << t.b << " a "
       << t.a.transpose().format(row) << "\n";
  os << "subject to " << p.constraints.size() << "\n";
  for (const auto& c : p.constraints) {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, LinearConstraint>) {
            os << "  linear " << k.name
               << (k.sense == Sense::kEqual ? " (==) b " : " (<=) b ") << k.b
               << " a " << k.a.transpose().format(row) << "\n";
          } else if constexpr (std::is_same_v<T, QuadraticConstraint>) {
            os << "  quadratic " << k.name << " nnz " << k.P.nonZeros() << " r "
               << k.r << " q " << k.q.transpose().format(row) << "\n";
          } else if constexpr (std::is_same_v<T, SecondOrderConeConstraint>) {
            os << "  soc " << k.name << " rows " << k.A.rows() << " d " << k.d << "\n";
          } else if constexpr (std::is_same_v<T, ExpConstraint>) {
            os << "  exp2 " << k.name << " b " << k.b << " d " << k.d << "\n";
          } else {
            os << "  log2 " << k.name << " f " << k.f << " b " << k.b << "\n";
          }
        },
        c);
  }
  os << "bounds\n";
  for (int i = 0; i < p.n; ++i) {
    if (std::isfinite(p.lower(i)) || std::isfinite(p.upper(i)))
      os << "  x" << i << " in [" << p.lower(i) << ", " << p.upper(i) << "]\n";
  }
}

}  // namespace risrsma::solver
