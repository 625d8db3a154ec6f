// SPDX-License-Identifier: Apache-2.0

#include "risrsma/channel_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace risrsma {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ScenarioConfig: " + what);
}

CVec draw_cn(std::mt19937_64& rng, Eigen::Index n, double variance) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

}  // namespace

double ScenarioConfig::alpha_bu(int k) const {
  if (alpha_bu_list.empty()) throw std::invalid_argument("ScenarioConfig: empty alpha_bu_list");
  const size_t i = std::min(static_cast<size_t>(k), alpha_bu_list.size() - 1);
  return alpha_bu_list[i];
}

void validate(const ScenarioConfig& c) {
  require(c.K >= 1 && c.N_T >= 1 && c.L >= 1, "K, N_T and L must be at least 1");
  require(c.user_radius >= 0.0, "user_radius must be nonnegative");
  require(c.d0 > 0.0, "d0 must be positive");
  require(!c.alpha_bu_list.empty(), "alpha_bu_list must not be empty");
  require(c.sigma_z2 > 0.0 && c.sigma_k2 > 0.0, "noise powers must be positive");
  require(c.P_bs_max > 0.0 && c.P_a_max > 0.0, "power budgets must be positive");
  require(c.R_min >= 0.0, "R_min must be nonnegative");
  require(c.eps_outer > 0.0 && c.eps_inner > 0.0 && c.solver_tol > 0.0,
          "tolerances must be positive");
  require(c.max_outer >= 1 && c.max_inner >= 1 && c.max_ris_inner >= 1 &&
              c.max_joint_inner >= 0,
          "iteration caps must be at least 1");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }
double dbw_to_watts(double dbw) { return db_to_linear(dbw); }

double path_loss_linear(double d, double alpha, double L0_dB, double d0) {
  if (!(d > 0.0) || !(d0 > 0.0)) throw std::domain_error("path_loss_linear: distance must be positive");
  return db_to_linear(L0_dB) * std::pow(d / d0, -alpha);
}

std::vector<Point2> sample_user_positions(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<Point2> pos;
  pos.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    const double r = cfg.user_radius * std::sqrt(ud(rng));
    const double th = 2.0 * std::numbers::pi * ud(rng);
    pos.push_back(cfg.user_center + r * Point2(std::cos(th), std::sin(th)));
  }
  return pos;
}

ChannelSet generate_channels(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  ChannelSet ch;
  ch.user_pos = sample_user_positions(cfg, rng);
  for (int k = 0; k < cfg.K; ++k) {
    const double d = (ch.user_pos[k] - cfg.bs_pos).norm();
    ch.g.push_back(draw_cn(rng, cfg.N_T, path_loss_linear(d, cfg.alpha_bu(k), cfg.L0_dB, cfg.d0)));
  }
  const double d_br = (cfg.ris_pos - cfg.bs_pos).norm();
  const CVec gv = draw_cn(rng, static_cast<Eigen::Index>(cfg.L) * cfg.N_T,
                          path_loss_linear(d_br, cfg.alpha_br, cfg.L0_dB, cfg.d0));
  ch.G = Eigen::Map<const CMat>(gv.data(), cfg.L, cfg.N_T);
  for (int k = 0; k < cfg.K; ++k) {
    const double d = (ch.user_pos[k] - cfg.ris_pos).norm();
    ch.f.push_back(draw_cn(rng, cfg.L, path_loss_linear(d, cfg.alpha_ru, cfg.L0_dB, cfg.d0)));
  }
  return ch;
}

CVec equivalent_channel(const ChannelSet& ch, const CVec& psi, int k) {
  if (k < 0 || k >= ch.K()) throw std::out_of_range("equivalent_channel: user index out of range");
  if (psi.size() != ch.L()) throw std::invalid_argument("equivalent_channel: psi has wrong length");
  // h = g + G^H diag(psi^*) f
  return ch.g[k] + ch.G.adjoint() * psi.conjugate().cwiseProduct(ch.f[k]);
}

}  // namespace risrsma
