// SPDX-License-Identifier: Apache-2.0

#include "risrsma/rsma_rates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace risrsma {

namespace {

void check_dims(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d) {
  if (psi.size() != ch.L() || d.K() != ch.K() || d.w0.size() != ch.N_T())
    throw std::invalid_argument("rsma_rates: dimension mismatch");
  for (const auto& wk : d.w)
    if (wk.size() != ch.N_T()) throw std::invalid_argument("rsma_rates: beam length mismatch");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

TransmitDesign TransmitDesign::zeros(int K, int N_T) {
  TransmitDesign d;
  d.w0 = CVec::Zero(N_T);
  d.w.assign(K, CVec::Zero(N_T));
  d.r_c = RVec::Zero(K);
  return d;
}

double TransmitDesign::power() const {
  double p = w0.squaredNorm();
  for (const auto& wk : w) p += wk.squaredNorm();
  return p;
}

double RateReport::max_violation() const {
  double v = 0.0;
  for (const auto& c : checks) v = std::max(v, c.residual);
  return v;
}

std::vector<std::string> RateReport::violated() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.ok) out.push_back(c.name);
  return out;
}

double ris_noise(const ChannelSet& ch, const CVec& psi, int k, double sigma_z2) {
  return psi.cwiseProduct(ch.f[k].conjugate()).squaredNorm() * sigma_z2;
}

double ris_power(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d, double sigma_z2) {
  double p = psi.cwiseProduct(ch.G * d.w0).squaredNorm();
  for (const auto& wk : d.w) p += psi.cwiseProduct(ch.G * wk).squaredNorm();
  return p + psi.squaredNorm() * sigma_z2;
}

Sinrs sinrs(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d, double sigma_z2,
            double sigma_k2) {
  check_dims(ch, psi, d);
  const int K = ch.K();
  Sinrs s{RVec(K), RVec(K)};
  for (int k = 0; k < K; ++k) {
    const CVec h = equivalent_channel(ch, psi, k);
    double priv = 0.0;
    for (int i = 0; i < K; ++i) priv += std::norm(h.dot(d.w[i]));
    const double noise = ris_noise(ch, psi, k, sigma_z2) + sigma_k2;
    const double own = std::norm(h.dot(d.w[k]));
    s.gamma_c(k) = std::norm(h.dot(d.w0)) / (priv + noise);
    s.gamma_p(k) = own / (priv - own + noise);
  }
  return s;
}

RateReport evaluate(const ChannelSet& ch, const RisVector& ris, const TransmitDesign& d,
                    const ScenarioConfig& cfg, double tol) {
  const Sinrs s = sinrs(ch, ris.psi, d, cfg.sigma_z2, cfg.sigma_k2);
  const int K = ch.K();
  RateReport r;
  r.gamma_c = s.gamma_c;
  r.gamma_p = s.gamma_p;
  r.R_c = (1.0 + s.gamma_c.array()).log() / std::log(2.0);
  r.R_p = (1.0 + s.gamma_p.array()).log() / std::log(2.0);
  r.sum_rate = d.r_c.sum() + r.R_p.sum();
  r.p_bs_used = d.power();
  r.p_a_used = ris_power(ch, ris.psi, d, cfg.sigma_z2);

  const auto add = [&](std::string name, double residual) {
    r.checks.push_back({std::move(name), residual, residual <= tol});
  };
  const double rc_total = d.r_c.sum();
  for (int k = 0; k < K; ++k) add("common_decodable[" + std::to_string(k + 1) + "]", rc_total - r.R_c(k));
  for (int k = 0; k < K; ++k)
    add("qos[" + std::to_string(k + 1) + "]", cfg.R_min - d.r_c(k) - r.R_p(k));
  add("bs_power", r.p_bs_used - cfg.P_bs_max);
  if (ris.mode == RisMode::kActive) {
    add("ris_power", r.p_a_used - cfg.P_a_max);
  } else {
    double dev = 0.0;
    for (Eigen::Index l = 0; l < ris.psi.size(); ++l)
      dev = std::max(dev, std::abs(std::abs(ris.psi(l)) - 1.0));
    add("unit_modulus", dev);
  }
  for (int k = 0; k < K; ++k) add("common_share_nonneg[" + std::to_string(k + 1) + "]", -d.r_c(k));
  r.feasible = true;
  for (const auto& c : r.checks) r.feasible = r.feasible && c.ok;
  return r;
}

double common_rate_cap(const ChannelSet& ch, const CVec& psi, const TransmitDesign& d,
                       double sigma_z2, double sigma_k2) {
  const Sinrs s = sinrs(ch, psi, d, sigma_z2, sigma_k2);
  return std::log2(1.0 + s.gamma_c.minCoeff());
}

std::optional<RVec> allocate_common_rate(const Sinrs& s, double R_min, double margin) {
  const RVec Rp = (1.0 + s.gamma_p.array()).log() / std::log(2.0);
  const double cap = std::log2(1.0 + s.gamma_c.minCoeff());
  const RVec deficit = (R_min - Rp.array()).max(0.0);
  if (deficit.sum() > cap) return std::nullopt;
  RVec r_c = deficit.array() + (cap - deficit.sum()) / static_cast<double>(Rp.size());
  return RVec(r_c * (1.0 - margin));
}

std::string rate_report_csv_header(int K) {
  std::ostringstream os;
  for (int k = 1; k <= K; ++k) os << "gamma_c_" << k << ",";
  for (int k = 1; k <= K; ++k) os << "gamma_p_" << k << ",";
  for (int k = 1; k <= K; ++k) os << "R_c_" << k << ",";
  for (int k = 1; k <= K; ++k) os << "R_p_" << k << ",";
  os << "sum_rate,p_bs_used,p_a_used,feasible,max_violation";
  return os.str();
}

std::string rate_report_csv_row(const RateReport& r) {
  std::ostringstream os;
  for (const RVec* v : {&r.gamma_c, &r.gamma_p, &r.R_c, &r.R_p})
    for (Eigen::Index k = 0; k < v->size(); ++k) os << fmt((*v)(k)) << ",";
  os << fmt(r.sum_rate) << "," << fmt(r.p_bs_used) << "," << fmt(r.p_a_used) << ","
     << (r.feasible ? 1 : 0) << "," << fmt(r.max_violation());
  return os.str();
}

}  // namespace risrsma
