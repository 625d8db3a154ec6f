// SPDX-License-Identifier: Apache-2.0

#include "risrsma/joint_refine.hpp"

#include <cmath>
#include <limits>

namespace risrsma {

namespace {

constexpr double kCapMargin = 1e-9;
constexpr double kArmijo = 1e-4;
constexpr int kLineSearchTries = 30;
constexpr double kAcceptGain = 1e-8;

struct Point {
  TransmitDesign d;
  RisVector ris;
};

// Pulls (d, ris) onto both budgets and re-allocates r_c. False when the
// beams are zero or no r_c meets QoS.
bool retract(const ChannelSet& ch, const ScenarioConfig& cfg, bool common, Point* x) {
  const double pw = x->d.power();
  if (!(pw > 0.0) || !std::isfinite(pw)) return false;
  const double s = std::sqrt((1.0 - kCapMargin) * cfg.P_bs_max / pw);
  x->d.w0 *= s;
  for (auto& wk : x->d.w) wk *= s;
  if (!common) x->d.w0.setZero();
  if (x->ris.mode == RisMode::kActive) {
    const double pa = ris_power(ch, x->ris.psi, x->d, cfg.sigma_z2);
    if (!(pa > 0.0) || !std::isfinite(pa)) return false;
    x->ris.psi *= std::sqrt((1.0 - kCapMargin) * cfg.P_a_max / pa);
  } else {
    for (auto& z : x->ris.psi) z = std::abs(z) > 0.0 ? z / std::abs(z) : Complex(1.0, 0.0);
  }
  if (common) {
    const std::optional<RVec> rc =
        allocate_common_rate(sinrs(ch, x->ris.psi, x->d, cfg.sigma_z2, cfg.sigma_k2), cfg.R_min);
    if (!rc) return false;
    x->d.r_c = *rc;
  } else {
    x->d.r_c.setZero();
  }
  return true;
}

double rate_of(const ChannelSet& ch, const ScenarioConfig& cfg, bool common, const Point& x) {
  const Sinrs s = sinrs(ch, x.ris.psi, x.d, cfg.sigma_z2, cfg.sigma_k2);
  const RVec Rp = (1.0 + s.gamma_p.array()).log() / std::log(2.0);
  if (!common && (Rp.array() < cfg.R_min).any()) return -std::numeric_limits<double>::infinity();
  return x.d.r_c.sum() + Rp.sum();
}

class Parametrization {
 public:
  Parametrization(const ChannelSet& ch, const ScenarioConfig& cfg, bool common, const Point& like)
      : ch_(ch), cfg_(cfg), common_(common), like_(like) {
    K_ = like.d.K();
    N_ = static_cast<int>(like.d.w0.size());
    L_ = static_cast<int>(like.ris.psi.size());
    w_scale_ = std::sqrt(cfg.P_bs_max);
    psi_scale_ = std::max(like.ris.psi.norm(), 1e-300);
  }

  int size() const { return 2 * (N_ * (K_ + 1) + L_); }

  RVec flatten(const Point& x) const {
    CVec v(N_ * (K_ + 1) + L_);
    v.segment(0, N_) = x.d.w0 / w_scale_;
    for (int k = 0; k < K_; ++k) v.segment((k + 1) * N_, N_) = x.d.w[k] / w_scale_;
    v.tail(L_) = x.ris.psi / psi_scale_;
    RVec z(2 * v.size());
    z << v.real(), v.imag();
    return z;
  }

  bool point(const RVec& z, Point* x) const {
    const Eigen::Index n = z.size() / 2;
    const CVec v = z.head(n).cast<Complex>() + Complex(0.0, 1.0) * z.tail(n).cast<Complex>();
    *x = like_;
    x->d.w0 = v.segment(0, N_) * w_scale_;
    for (int k = 0; k < K_; ++k) x->d.w[k] = v.segment((k + 1) * N_, N_) * w_scale_;
    x->ris.psi = v.tail(L_) * psi_scale_;
    return retract(ch_, cfg_, common_, x);
  }

  double value(const RVec& z) const {
    Point x;
    if (!point(z, &x)) return -std::numeric_limits<double>::infinity();
    return rate_of(ch_, cfg_, common_, x);
  }

 private:
  const ChannelSet& ch_;
  const ScenarioConfig& cfg_;
  bool common_;
  Point like_;
  int K_ = 0, N_ = 0, L_ = 0;
  double w_scale_ = 1.0, psi_scale_ = 1.0;
};

}  // namespace

double retracted_sum_rate(const ChannelSet& ch, const ScenarioConfig& cfg, bool common_stream,
                          const TransmitDesign& d, const RisVector& ris) {
  Point x{d, ris};
  if (!retract(ch, cfg, common_stream, &x)) return -std::numeric_limits<double>::infinity();
  return rate_of(ch, cfg, common_stream, x);
}

JointRefineResult joint_refine(const ChannelSet& ch, const ScenarioConfig& cfg,
                               const TransmitDesign& d, const RisVector& ris,
                               const JointRefineOptions& opts) {
  JointRefineResult res;
  res.design = d;
  res.ris = ris;
  const RateReport start = evaluate(ch, ris, d, cfg);
  res.sum_rate = start.sum_rate;
  if (!start.feasible) {
    res.message = "start infeasible";
    return res;
  }

  const Parametrization par(ch, cfg, opts.common_stream, Point{d, ris});
  const int n = par.size();
  const double h = opts.fd_step;
  const auto gradient = [&](const RVec& z) {
    RVec g(n);
    RVec zz = z;
    for (int i = 0; i < n; ++i) {
      zz(i) = z(i) + h;
      const double fp = par.value(zz);
      zz(i) = z(i) - h;
      const double fm = par.value(zz);
      zz(i) = z(i);
      g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  RVec z = par.flatten(Point{d, ris});
  double f = par.value(z);
  if (!std::isfinite(f)) {
    res.message = "retraction failed at start";
    return res;
  }
  RVec g = gradient(z);
  if (!g.allFinite()) {
    res.message = "gradient not finite";
    return res;
  }
  // Inverse Hessian of -f; the first step moves about 1e-2 in normalized units.
  RMat H = RMat::Identity(n, n) * (1e-2 / std::max(g.norm(), 1e-300));
  bool scaled = false;
  res.message = "max iterations";
  for (int it = 0; it < opts.max_iterations; ++it) {
    RVec dir = H * g;
    double slope = g.dot(dir);
    if (!(slope > 0.0)) {
      H = RMat::Identity(n, n) * (1e-2 / std::max(g.norm(), 1e-300));
      dir = H * g;
      slope = g.dot(dir);
    }
    double a = 1.0;
    double fn = f;
    bool accepted = false;
    for (int t = 0; t < kLineSearchTries; ++t, a *= 0.5) {
      fn = par.value(z + a * dir);
      if (std::isfinite(fn) && fn > f + kArmijo * a * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.message = "line search failed";
      break;
    }
    const RVec zn = z + a * dir;
    const RVec gn = gradient(zn);
    if (!gn.allFinite()) {
      res.message = "gradient not finite";
      break;
    }
    const RVec s = zn - z;
    const RVec y = g - gn;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (!scaled) {
        H = RMat::Identity(n, n) * (sy / y.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RVec Hy = H * y;
      H += ((1.0 + rho * y.dot(Hy)) * rho) * (s * s.transpose()) -
           rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    const double gain = fn - f;
    z = zn;
    g = gn;
    f = fn;
    res.iterations = it + 1;
    if (gain < opts.min_gain) {
      res.message = "gain below threshold";
      break;
    }
  }

  Point best;
  if (res.iterations == 0 || !par.point(z, &best)) return res;
  const RateReport rep = evaluate(ch, best.ris, best.d, cfg);
  if (!rep.feasible || !(rep.sum_rate > start.sum_rate + kAcceptGain)) {
    res.message += "; no verified gain";
    return res;
  }
  res.design = best.d;
  res.ris = best.ris;
  res.sum_rate = rep.sum_rate;
  res.changed = true;
  return res;
}

}  // namespace risrsma
