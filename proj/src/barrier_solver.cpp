// SPDX-License-Identifier: Apache-2.0

// Log-barrier interior-point method with a phase-I feasibility stage.
//
// Phase II minimizes t*F0(x) + B(x) along the central path, with F0 the
// negated objective and B the sum of the constraint barriers. Phase I, run
// only when the starting point is not strictly feasible, minimizes the
// common shift s in  w_i f_i(x) <= s  (w_i > 0 normalizes constraint scales
// at the starting point) until s drops below zero.

#include <algorithm>
#include <cmath>
#include <limits>

#include "risrsma/convex_program.hpp"

namespace risrsma::solver {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExpOverflow = 1000.0;

enum class SmoothKind { kQuadratic, kExp, kLog };

struct SmoothTerm {
  SmoothKind kind;
  const void* data;
  int source;
  double weight = 1.0;
};

struct ConeTerm {
  const SecondOrderConeConstraint* data;
  int source;
  double weight = 1.0;
};

// Where a row of the internal linear-inequality block came from.
struct LinearSource {
  enum class Kind { kConstraint, kLower, kUpper, kDomain } kind;
  int index;
};

struct Problem {
  const ConvexProgram* prog = nullptr;
  int n = 0;
  RMat A_ineq;  // A_ineq x <= b_ineq
  RVec b_ineq;
  std::vector<LinearSource> lin_src;
  RMat A_eq;
  RVec b_eq;
  std::vector<int> eq_src;
  std::vector<SmoothTerm> smooth;
  std::vector<ConeTerm> cones;
  RVec lin_weight;
};

// Value, gradient and Hessian of a smooth inequality function f(x) <= 0.
// Returns false outside the function domain. The Hessian is added to `hess`
// scaled by `hess_scale` to avoid forming it explicitly.
bool eval_smooth(const SmoothTerm& term, const RVec& x, double* value, RVec* grad,
                 RMat* hess, double hess_scale) {
  switch (term.kind) {
    case SmoothKind::kQuadratic: {
      const auto& c = *static_cast<const QuadraticConstraint*>(term.data);
      const RVec Px = c.P * x;
      *value = x.dot(Px) + c.q.dot(x) + c.r;
      if (grad) *grad = 2.0 * Px + c.q;
      if (hess) {
        for (int k = 0; k < c.P.outerSize(); ++k)
          for (Eigen::SparseMatrix<double>::InnerIterator it(c.P, k); it; ++it)
            (*hess)(it.row(), it.col()) += 2.0 * hess_scale * it.value();
      }
      return std::isfinite(*value);
    }
    case SmoothKind::kExp: {
      const auto& c = *static_cast<const ExpConstraint*>(term.data);
      const double z = c.a.dot(x) + c.b;
      if (z > kExpOverflow) return false;
      const double p = std::exp2(z);
      *value = p - c.c.dot(x) - c.d;
      if (grad) *grad = kLn2 * p * c.a - c.c;
      if (hess) {
        hess->topLeftCorner(x.size(), x.size())
            .selfadjointView<Eigen::Lower>()
            .rankUpdate(c.a, hess_scale * kLn2 * kLn2 * p);
      }
      return true;
    }
    case SmoothKind::kLog: {
      const auto& c = *static_cast<const LogConstraint*>(term.data);
      const double z = 1.0 + c.a.dot(x) + c.b;
      if (!(z > 0.0)) return false;
      *value = c.e.dot(x) + c.f - std::log2(z);
      if (grad) *grad = c.e - c.a / (kLn2 * z);
      if (hess) {
        hess->topLeftCorner(x.size(), x.size())
            .selfadjointView<Eigen::Lower>()
            .rankUpdate(c.a, hess_scale / (kLn2 * z * z));
      }
      return true;
    }
  }
  return false;
}

Problem build_problem(const ConvexProgram& p) {
  Problem pb;
  pb.prog = &p;
  pb.n = p.n;
  std::vector<RVec> rows;
  std::vector<double> rhs;
  std::vector<RVec> erows;
  std::vector<double> erhs;
  for (int i = 0; i < p.num_constraints(); ++i) {
    const auto& c = p.constraints[i];
    if (const auto* lc = std::get_if<LinearConstraint>(&c)) {
      if (lc->sense == Sense::kEqual) {
        erows.push_back(lc->a);
        erhs.push_back(lc->b);
        pb.eq_src.push_back(i);
      } else {
        rows.push_back(lc->a);
        rhs.push_back(lc->b);
        pb.lin_src.push_back({LinearSource::Kind::kConstraint, i});
      }
    } else if (const auto* qc = std::get_if<QuadraticConstraint>(&c)) {
      pb.smooth.push_back({SmoothKind::kQuadratic, qc, i});
    } else if (const auto* ec = std::get_if<ExpConstraint>(&c)) {
      pb.smooth.push_back({SmoothKind::kExp, ec, i});
    } else if (const auto* gc = std::get_if<LogConstraint>(&c)) {
      pb.smooth.push_back({SmoothKind::kLog, gc, i});
    } else {
      pb.cones.push_back({&std::get<SecondOrderConeConstraint>(c), i});
    }
  }
  for (int j = 0; j < p.n; ++j) {
    if (std::isfinite(p.lower(j))) {
      RVec a = RVec::Zero(p.n);
      a(j) = -1.0;
      rows.push_back(a);
      rhs.push_back(-p.lower(j));
      pb.lin_src.push_back({LinearSource::Kind::kLower, j});
    }
    if (std::isfinite(p.upper(j))) {
      RVec a = RVec::Zero(p.n);
      a(j) = 1.0;
      rows.push_back(a);
      rhs.push_back(p.upper(j));
      pb.lin_src.push_back({LinearSource::Kind::kUpper, j});
    }
  }
  pb.A_ineq.resize(static_cast<Eigen::Index>(rows.size()), p.n);
  pb.b_ineq.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    pb.A_ineq.row(r) = rows[r].transpose();
    pb.b_ineq(r) = rhs[r];
  }
  pb.A_eq.resize(static_cast<Eigen::Index>(erows.size()), p.n);
  pb.b_eq.resize(static_cast<Eigen::Index>(erows.size()));
  for (size_t r = 0; r < erows.size(); ++r) {
    pb.A_eq.row(r) = erows[r].transpose();
    pb.b_eq(r) = erhs[r];
  }
  pb.lin_weight = RVec::Ones(pb.A_ineq.rows());
  return pb;
}

// Barrier function state for one stage (phase I or phase II).
struct Stage {
  Stage(const Problem* problem, bool first_phase) : pb(problem), phase1(first_phase) {}

  const Problem* pb;
  bool phase1 = false;
  double s_floor = -1.0;
  // Phase-I only: rows 1 + a'x + b > 0 keeping objective log terms defined.
  RMat dom_A;
  RVec dom_b;

  int dim() const { return pb->n + (phase1 ? 1 : 0); }

  double degrees() const {
    double m = static_cast<double>(pb->A_ineq.rows() + pb->smooth.size()) +
               2.0 * static_cast<double>(pb->cones.size());
    if (phase1) m += 1.0 + static_cast<double>(dom_A.rows());
    return m;
  }

  // Returns false when y is outside the barrier domain.
  bool eval(const RVec& y, double t, double* phi, RVec* grad, RMat* hess) const {
    const int n = pb->n;
    const int N = dim();
    const RVec x = y.head(n);
    const double s = phase1 ? y(n) : 0.0;
    const bool derivs = grad != nullptr;
    double f = 0.0;
    if (derivs) {
      grad->setZero(N);
      hess->setZero(N, N);
    }

    // Linear inequalities: slack d = w (b - a'x) + s.
    if (pb->A_ineq.rows() > 0) {
      const RVec ax = pb->A_ineq * x;
      RVec d = (pb->b_ineq - ax);
      if (phase1) d = d.cwiseProduct(pb->lin_weight).array() + s;
      if ((d.array() <= 0.0).any()) return false;
      f -= d.array().log().sum();
      if (derivs) {
        const RVec inv = d.cwiseInverse();
        RVec wi = inv;
        if (phase1) wi = wi.cwiseProduct(pb->lin_weight);
        grad->head(n) += pb->A_ineq.transpose() * wi;
        const RMat W = wi.asDiagonal() * pb->A_ineq;
        hess->topLeftCorner(n, n).noalias() += W.transpose() * W;
        if (phase1) {
          (*grad)(n) -= inv.sum();
          const RVec cross = W.transpose() * inv;
          hess->row(n).head(n) -= cross.transpose();
          hess->col(n).head(n) -= cross;
          (*hess)(n, n) += inv.squaredNorm();
        }
      }
    }

    for (const auto& term : pb->smooth) {
      double v = 0.0;
      RVec g;
      const double w = phase1 ? term.weight : 1.0;
      // Hessian scale is only known after the value; evaluate once for the
      // value, then add curvature below.
      if (!eval_smooth(term, x, &v, derivs ? &g : nullptr, nullptr, 0.0)) return false;
      const double d = (phase1 ? s : 0.0) - w * v;
      if (!(d > 0.0)) return false;
      f -= std::log(d);
      if (derivs) {
        double dummy = 0.0;
        eval_smooth(term, x, &dummy, nullptr, hess, w / d);
        RVec gy = RVec::Zero(N);
        gy.head(n) = w * g;
        if (phase1) gy(n) = -1.0;
        *grad += gy / d;
        hess->selfadjointView<Eigen::Lower>().rankUpdate(gy, 1.0 / (d * d));
      }
    }

    for (const auto& cone : pb->cones) {
      const auto& c = *cone.data;
      const double w = phase1 ? cone.weight : 1.0;
      const double u = w * (c.c.dot(x) + c.d) + (phase1 ? s : 0.0);
      const RVec v = w * (c.A * x + c.b);
      const double q = u * u - v.squaredNorm();
      if (!(u > 0.0) || !(q > 0.0)) return false;
      f -= std::log(q);
      if (derivs) {
        RVec du = RVec::Zero(N);
        du.head(n) = w * c.c;
        if (phase1) du(n) = 1.0;
        RVec gq = 2.0 * u * du;
        gq.head(n) -= 2.0 * w * (c.A.transpose() * v);
        *grad -= gq / q;
        hess->selfadjointView<Eigen::Lower>().rankUpdate(gq, 1.0 / (q * q));
        hess->selfadjointView<Eigen::Lower>().rankUpdate(du, -2.0 / q);
        const RMat WA = w * c.A;
        hess->topLeftCorner(n, n).noalias() += (2.0 / q) * (WA.transpose() * WA);
      }
    }

    if (phase1) {
      if (dom_A.rows() > 0) {
        const RVec z = dom_A * x + dom_b;
        if ((z.array() <= 0.0).any()) return false;
        f -= z.array().log().sum();
        if (derivs) {
          const RVec inv = z.cwiseInverse();
          grad->head(n) -= dom_A.transpose() * inv;
          const RMat W = inv.asDiagonal() * dom_A;
          hess->topLeftCorner(n, n).noalias() += W.transpose() * W;
        }
      }
      const double floor_gap = s - s_floor;
      if (!(floor_gap > 0.0)) return false;
      f += t * s - std::log(floor_gap);
      if (derivs) {
        (*grad)(n) += t - 1.0 / floor_gap;
        (*hess)(n, n) += 1.0 / (floor_gap * floor_gap);
      }
    } else {
      const auto& obj = pb->prog->objective;
      double F0 = -(obj.linear.dot(x) + obj.constant);
      if (obj.quadratic.size() > 0) F0 -= x.dot(obj.quadratic * x);
      for (const auto& lt : obj.log_terms) {
        const double z = 1.0 + lt.a.dot(x) + lt.b;
        if (!(z > 0.0)) return false;
        F0 -= lt.weight * std::log2(z);
      }
      f += t * F0;
      if (derivs) {
        grad->head(n) -= t * obj.linear;
        if (obj.quadratic.size() > 0) {
          grad->head(n) -= 2.0 * t * (obj.quadratic * x);
          hess->topLeftCorner(n, n) -= 2.0 * t * obj.quadratic;
        }
        for (const auto& lt : obj.log_terms) {
          const double z = 1.0 + lt.a.dot(x) + lt.b;
          grad->head(n) -= t * lt.weight / (kLn2 * z) * lt.a;
          hess->topLeftCorner(n, n).selfadjointView<Eigen::Lower>().rankUpdate(
              lt.a, t * lt.weight / (kLn2 * z * z));
        }
      }
    }
    *phi = f;
    return std::isfinite(f);
  }
};

// Newton direction for min phi s.t. E dy = 0. Returns false if the
// (regularized) system cannot be factorized.
bool newton_direction(const RMat& hess, const RVec& grad, const RMat& E, RVec* dy) {
  const double dscale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
  double reg = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    RMat H = hess;
    if (reg > 0.0) H.diagonal().array() += reg;
    Eigen::LLT<RMat, Eigen::Lower> llt(H);
    if (llt.info() == Eigen::Success) {
      if (E.rows() == 0) {
        *dy = -llt.solve(grad);
        // Refinement against the unregularized matrix.
        for (int k = 0; k < 2; ++k) {
          const RVec r = -grad - hess.selfadjointView<Eigen::Lower>() * (*dy);
          *dy += llt.solve(r);
        }
      } else {
        const RMat Y = llt.solve(E.transpose());
        const RVec z = llt.solve(grad);
        const RMat S = E * Y;
        const RVec nu = S.ldlt().solve(-E * z);
        *dy = -(z + Y * nu);
      }
      if (dy->allFinite()) return true;
    }
    reg = (reg == 0.0) ? 1e-13 * dscale : reg * 100.0;
  }
  return false;
}

struct CenterResult {
  bool ok = true;
  int steps = 0;
};

// Damped Newton centering for one value of t, at most max_steps Newton
// steps. `stop` may end the loop early.
template <typename Stop>
CenterResult center(const Stage& stage, const RMat& E, double t, RVec* y, int budget,
                    int max_steps, Stop stop) {
  CenterResult res;
  const int N = stage.dim();
  RVec grad(N), dy(N);
  RMat hess(N, N);
  double phi = 0.0;
  for (int it = 0; it < max_steps && res.steps < budget; ++it) {
    if (!stage.eval(*y, t, &phi, &grad, &hess)) {
      res.ok = false;
      return res;
    }
    if (!newton_direction(hess, grad, E, &dy)) {
      res.ok = false;
      return res;
    }
    ++res.steps;
    const double dec2 = -grad.dot(dy);
    if (dec2 <= 0.0 || 0.5 * dec2 <= 1e-13) break;
    double alpha = 1.0;
    bool moved = false;
    // Inside the quadratic-convergence region the full step is safe and
    // Armijo comparisons of phi are swamped by round-off at large t.
    if (dec2 < 0.05) {
      const RVec trial = *y + dy;
      double phi_trial = 0.0;
      if (stage.eval(trial, t, &phi_trial, nullptr, nullptr)) {
        *y = trial;
        if (stop(*y)) break;
        continue;
      }
    }
    for (int ls = 0; ls < 80; ++ls) {
      const RVec trial = *y + alpha * dy;
      double phi_trial = 0.0;
      if (stage.eval(trial, t, &phi_trial, nullptr, nullptr) &&
          phi_trial <= phi - 0.01 * alpha * dec2) {
        *y = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;  // round-off floor of phi
    if (stop(*y)) break;
  }
  return res;
}

RVec project_onto_equalities(const Problem& pb, const RVec& x) {
  if (pb.A_eq.rows() == 0) return x;
  const RVec r = pb.A_eq * x - pb.b_eq;
  const RMat AAt = pb.A_eq * pb.A_eq.transpose();
  return x - pb.A_eq.transpose() * AAt.ldlt().solve(r);
}

// Multipliers on the central path at x for barrier weight t.
void recover_duals(const Problem& pb, const RVec& x, double t, Solution* sol) {
  const ConvexProgram& p = *pb.prog;
  sol->duals = RVec::Zero(p.num_constraints());
  sol->lower_duals = RVec::Zero(p.n);
  sol->upper_duals = RVec::Zero(p.n);
  if (pb.A_ineq.rows() > 0) {
    const RVec d = pb.b_ineq - pb.A_ineq * x;
    for (Eigen::Index r = 0; r < d.size(); ++r) {
      const double lam = 1.0 / (t * d(r));
      const auto& src = pb.lin_src[r];
      switch (src.kind) {
        case LinearSource::Kind::kConstraint: sol->duals(src.index) = lam; break;
        case LinearSource::Kind::kLower: sol->lower_duals(src.index) = lam; break;
        case LinearSource::Kind::kUpper: sol->upper_duals(src.index) = lam; break;
        case LinearSource::Kind::kDomain: break;
      }
    }
  }
  for (const auto& term : pb.smooth) {
    double v = 0.0;
    if (eval_smooth(term, x, &v, nullptr, nullptr, 0.0) && v < 0.0)
      sol->duals(term.source) = 1.0 / (t * -v);
  }
  for (const auto& cone : pb.cones) {
    const auto& c = *cone.data;
    const double u = c.c.dot(x) + c.d;
    const double q = u * u - (c.A * x + c.b).squaredNorm();
    if (q > 0.0) sol->duals(cone.source) = 2.0 * u / (t * q);
  }
}

// Gradient of the negated objective.
RVec objective_gradient(const ConvexProgram& p, const RVec& x) {
  RVec g = -p.objective.linear;
  if (p.objective.quadratic.size() > 0) g -= 2.0 * (p.objective.quadratic * x);
  for (const auto& lt : p.objective.log_terms) {
    const double z = 1.0 + lt.a.dot(x) + lt.b;
    g -= lt.weight / (kLn2 * z) * lt.a;
  }
  return g;
}

struct ResidualParts {
  RVec stationarity;
  double complementarity = 0.0;
  double primal = 0.0;
};

// Lagrangian gradient (excluding equality multipliers when `with_eq` is
// false), total complementarity (the duality gap on the path) and primal violation.
ResidualParts residual_parts(const ConvexProgram& p, const Solution& s, bool with_eq) {
  const RVec& x = s.x;
  ResidualParts rp;
  rp.stationarity = objective_gradient(p, x);
  for (int i = 0; i < p.num_constraints(); ++i) {
    const double lam = s.duals.size() > i ? s.duals(i) : 0.0;
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          double f = 0.0;
          RVec g;
          bool equality = false;
          if constexpr (std::is_same_v<T, LinearConstraint>) {
            f = c.a.dot(x) - c.b;
            g = c.a;
            equality = c.sense == Sense::kEqual;
          } else if constexpr (std::is_same_v<T, QuadraticConstraint>) {
            const RVec Px = c.P * x;
            f = x.dot(Px) + c.q.dot(x) + c.r;
            g = 2.0 * Px + c.q;
          } else if constexpr (std::is_same_v<T, SecondOrderConeConstraint>) {
            const RVec v = c.A * x + c.b;
            const double nv = v.norm();
            f = nv - c.c.dot(x) - c.d;
            g = -c.c;
            if (nv > 0.0) g += c.A.transpose() * v / nv;
          } else if constexpr (std::is_same_v<T, ExpConstraint>) {
            const double pz = std::exp2(c.a.dot(x) + c.b);
            f = pz - c.c.dot(x) - c.d;
            g = kLn2 * pz * c.a - c.c;
          } else {
            const double z = 1.0 + c.a.dot(x) + c.b;
            f = c.e.dot(x) + c.f - std::log2(z);
            g = c.e - c.a / (kLn2 * z);
          }
          if (equality) {
            rp.primal = std::max(rp.primal, std::abs(f));
            if (with_eq) rp.stationarity += lam * g;
          } else {
            rp.primal = std::max(rp.primal, std::max(f, 0.0));
            rp.complementarity += std::abs(lam * f);
            rp.stationarity += lam * g;
          }
        },
        p.constraints[i]);
  }
  for (int j = 0; j < p.n; ++j) {
    const double lo = s.lower_duals.size() > j ? s.lower_duals(j) : 0.0;
    const double hi = s.upper_duals.size() > j ? s.upper_duals(j) : 0.0;
    if (std::isfinite(p.lower(j))) {
      const double f = p.lower(j) - x(j);
      rp.primal = std::max(rp.primal, std::max(f, 0.0));
      rp.complementarity += std::abs(lo * f);
      rp.stationarity(j) -= lo;
    }
    if (std::isfinite(p.upper(j))) {
      const double f = x(j) - p.upper(j);
      rp.primal = std::max(rp.primal, std::max(f, 0.0));
      rp.complementarity += std::abs(hi * f);
      rp.stationarity(j) += hi;
    }
  }
  return rp;
}

}  // namespace

double kkt_residual(const ConvexProgram& p, const Solution& s) {
  const ResidualParts rp = residual_parts(p, s, true);
  const double gscale = 1.0 + objective_gradient(p, s.x).cwiseAbs().maxCoeff();
  const double fscale = 1.0 + std::abs(p.evaluate_objective(s.x));
  const double stat = rp.stationarity.size() ? rp.stationarity.cwiseAbs().maxCoeff() : 0.0;
  return std::max({stat / gscale, rp.complementarity / fscale, rp.primal});
}

namespace {

// Multipliers, objective value and residuals of sol.x on the path point t.
void finalize_duals(const Problem& pb, double t, Solution* sol) {
  const ConvexProgram& program = *pb.prog;
  sol->objective_value = program.evaluate_objective(sol->x);
  recover_duals(pb, sol->x, t, sol);
  if (pb.A_eq.rows() > 0) {
    const ResidualParts rp = residual_parts(program, *sol, false);
    const RMat AAt = pb.A_eq * pb.A_eq.transpose();
    const RVec nu = AAt.ldlt().solve(-(pb.A_eq * rp.stationarity));
    for (size_t r = 0; r < pb.eq_src.size(); ++r) sol->duals(pb.eq_src[r]) = nu(r);
  }
  sol->primal_residual = residual_parts(program, *sol, true).primal;
  sol->kkt_residual = kkt_residual(program, *sol);
}

}  // namespace

Solution solve(const ConvexProgram& program, const SolverOptions& options) {
  program.validate();
  Problem pb = build_problem(program);
  const int n = program.n;
  Solution sol;
  sol.x = RVec::Zero(n);

  RVec x = options.initial_point.size() == n ? options.initial_point : RVec::Zero(n);
  x = project_onto_equalities(pb, x);
  int budget = options.max_newton_steps;

  // Strict feasibility of the starting point.
  const auto strictly_feasible = [&](const RVec& z) {
    Stage st{&pb, false};
    double phi = 0.0;
    if (!st.eval(z, 1.0, &phi, nullptr, nullptr)) return false;
    return true;
  };

  if (!strictly_feasible(x)) {
    Stage ph1{&pb, true};
    // Log terms of the objective must stay defined while searching.
    const auto& logs = program.objective.log_terms;
    ph1.dom_A.resize(static_cast<Eigen::Index>(logs.size()), n);
    ph1.dom_b.resize(static_cast<Eigen::Index>(logs.size()));
    for (size_t i = 0; i < logs.size(); ++i) {
      ph1.dom_A.row(i) = logs[i].a.transpose();
      ph1.dom_b(i) = 1.0 + logs[i].b;
    }
    if (ph1.dom_A.rows() > 0 && ((ph1.dom_A * x + ph1.dom_b).array() <= 0.0).any()) {
      sol.x = x;
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "starting point outside the objective domain";
      return sol;
    }
    // Normalize constraints at the starting point and pick the initial shift.
    double worst = -kInf;
    for (Eigen::Index r = 0; r < pb.A_ineq.rows(); ++r) {
      const double f = pb.A_ineq.row(r).dot(x) - pb.b_ineq(r);
      const double scale = std::max({std::abs(f), pb.A_ineq.row(r).norm(), 1e-300});
      pb.lin_weight(r) = 1.0 / scale;
      worst = std::max(worst, f / scale);
    }
    for (auto& term : pb.smooth) {
      double v = 0.0;
      RVec g;
      if (!eval_smooth(term, x, &v, &g, nullptr, 0.0)) {
        sol.x = x;
        sol.status = SolveStatus::kNumericalFailure;
        sol.message = "starting point outside a constraint domain";
        return sol;
      }
      const double scale = std::max({std::abs(v), g.norm(), 1e-300});
      term.weight = 1.0 / scale;
      worst = std::max(worst, v / scale);
    }
    for (auto& cone : pb.cones) {
      const auto& c = *cone.data;
      const double u = c.c.dot(x) + c.d;
      const double nv = (c.A * x + c.b).norm();
      const double scale = std::max({std::abs(u), nv, c.c.norm(), 1e-300});
      cone.weight = 1.0 / scale;
      // Shift must exceed the distance to the cone in strict form.
      worst = std::max(worst, (nv - u) / scale);
    }
    const double s0 = worst + 1.0;
    ph1.s_floor = std::min(-1.0, s0 - 2.0);
    RVec y(n + 1);
    y.head(n) = x;
    y(n) = s0;
    RMat E1 = RMat::Zero(pb.A_eq.rows(), n + 1);
    if (pb.A_eq.rows() > 0) E1.leftCols(n) = pb.A_eq;

    const double m1 = ph1.degrees();
    double t = 1.0;
    const auto deep_enough = [&](const RVec& z) { return z(n) < -1e-4; };
    bool done = false;
    while (!done && budget > 0) {
      const CenterResult cr = center(ph1, E1, t, &y, budget, 100, deep_enough);
      budget -= cr.steps;
      sol.newton_iterations += cr.steps;
      if (!cr.ok) break;
      if (deep_enough(y) || m1 / t < 1e-10) done = true;
      t *= 10.0;
    }
    x = y.head(n);
    if (!(y(n) < 0.0) || !strictly_feasible(x)) {
      sol.x = x;
      sol.status = SolveStatus::kInfeasible;
      sol.message = "phase I found no strictly feasible point";
      sol.objective_value = program.evaluate_objective(x);
      return sol;
    }
    // Restore unit weights for phase II.
    pb.lin_weight.setOnes();
    for (auto& term : pb.smooth) term.weight = 1.0;
    for (auto& cone : pb.cones) cone.weight = 1.0;
  }

  Stage ph2{&pb, false};
  const double m = ph2.degrees();
  const auto never = [](const RVec&) { return false; };
  double t = 1.0;
  {
    // Balance objective and barrier gradients at the start.
    RVec g0(n), gb(n);
    RMat h(n, n);
    double phi = 0.0;
    Stage only_barrier = ph2;
    ph2.eval(x, 1.0, &phi, &g0, &h);
    only_barrier.eval(x, 0.0, &phi, &gb, &h);
    const RVec gobj = g0 - gb;
    const double denom = gobj.squaredNorm();
    if (m > 0 && denom > 0.0) {
      t = -gobj.dot(gb) / denom;
      if (!(t > 0.0)) t = m / (1.0 + std::abs(program.evaluate_objective(x)));
      t = std::clamp(t, 1e-8, 1e8);
    }
  }
  const double mu = 20.0;
  bool ok = true;
  // Past a problem-dependent t the centering hits its round-off floor and
  // stationarity degrades, so the best iterate along the path is kept.
  Solution best;
  best.kkt_residual = kInf;
  bool first = true;
  while (budget > 0) {
    // From a far starting point, e.g. in a long thin feasible set, the first
    // centering can need many damped steps; later ones start near the path.
    const CenterResult cr = center(ph2, pb.A_eq, t, &x, budget, first ? 1000 : 100, never);
    first = false;
    budget -= cr.steps;
    sol.newton_iterations += cr.steps;
    if (!cr.ok) {
      ok = false;
      break;
    }
    sol.x = x;
    finalize_duals(pb, t, &sol);
    if (sol.kkt_residual <= std::max(best.kkt_residual, 0.5 * options.tol)) best = sol;
    const double fscale = 1.0 + std::abs(program.evaluate_objective(x));
    if (m == 0.0 || m / t < 1e-3 * options.tol * fscale) break;
    t *= mu;
  }
  if (std::isfinite(best.kkt_residual)) {
    best.newton_iterations = sol.newton_iterations;
    sol = best;
  } else {
    sol.x = x;
    finalize_duals(pb, t, &sol);
  }
  x = sol.x;
  if (!x.allFinite()) {
    sol.status = SolveStatus::kNumericalFailure;
    sol.message = "non-finite iterate";
  } else if (sol.kkt_residual <= options.tol && sol.primal_residual <= options.tol) {
    sol.status = SolveStatus::kOptimal;
  } else if (budget <= 0) {
    sol.status = SolveStatus::kMaxIter;
  } else {
    sol.status = SolveStatus::kNumericalFailure;
    sol.message = ok ? "stalled before reaching tolerance" : "Newton system failure";
  }
  return sol;
}

bool usable(const Solution& s, double tol) {
  if (s.status == SolveStatus::kInfeasible || s.x.size() == 0 || !s.x.allFinite()) return false;
  return s.status != SolveStatus::kNumericalFailure || s.primal_residual <= tol;
}

}  // namespace risrsma::solver
