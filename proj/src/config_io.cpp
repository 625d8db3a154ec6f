// SPDX-License-Identifier: Apache-2.0

#include "risrsma/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace risrsma {

using nlohmann::json;

namespace {

json point_json(const Point2& p) { return json::array({p.x(), p.y()}); }

// Reads the keys of one section, rejecting any it does not know.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) throw std::invalid_argument("section '" + name + "' must be an object");
  }

  template <class T>
  void get(const std::string& key, T* out) {
    seen_.push_back(key);
    if (node_ == nullptr || !node_->contains(key)) return;
    try {
      *out = node_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(name_ + "." + key + ": " + e.what());
    }
  }

  void point(const std::string& key, Point2* out) {
    std::vector<double> v{out->x(), out->y()};
    get(key, &v);
    if (v.size() != 2) throw std::invalid_argument(name_ + "." + key + ": expected [x, y]");
    *out = Point2(v[0], v[1]);
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& item : node_->items())
      if (std::find(seen_.begin(), seen_.end(), item.key()) == seen_.end())
        throw std::invalid_argument("unknown key '" + name_ + "." + item.key() + "'");
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::vector<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const char* kSections[] = {"seed",  "system", "geometry",  "path_loss", "noise",
                                    "power", "qos",    "algorithm", "sweep"};
  for (const auto& item : root.items())
    if (std::find(std::begin(kSections), std::end(kSections), item.key()) == std::end(kSections))
      throw std::invalid_argument("unknown section '" + item.key() + "'");

  ExperimentConfig cfg;
  ScenarioConfig& s = cfg.scenario;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) throw std::invalid_argument("seed must be a nonnegative integer");
    s.seed = root["seed"].get<std::uint64_t>();
  }

  Section sys(root, "system");
  sys.get("K", &s.K);
  sys.get("N_T", &s.N_T);
  sys.get("L", &s.L);
  sys.finish();

  Section geo(root, "geometry");
  geo.point("bs_pos", &s.bs_pos);
  geo.point("ris_pos", &s.ris_pos);
  geo.point("user_center", &s.user_center);
  geo.get("user_radius", &s.user_radius);
  geo.finish();

  Section pl(root, "path_loss");
  pl.get("L0_dB", &s.L0_dB);
  pl.get("d0", &s.d0);
  pl.get("alpha_bu", &s.alpha_bu_list);
  pl.get("alpha_br", &s.alpha_br);
  pl.get("alpha_ru", &s.alpha_ru);
  pl.finish();

  Section noise(root, "noise");
  noise.get("sigma_z2", &s.sigma_z2);
  noise.get("sigma_k2", &s.sigma_k2);
  noise.finish();

  Section pw(root, "power");
  pw.get("P_bs_max", &s.P_bs_max);
  pw.get("P_a_max", &s.P_a_max);
  pw.finish();

  Section qos(root, "qos");
  qos.get("R_min", &s.R_min);
  qos.finish();

  Section alg(root, "algorithm");
  alg.get("eps_outer", &s.eps_outer);
  alg.get("eps_inner", &s.eps_inner);
  alg.get("max_outer", &s.max_outer);
  alg.get("max_inner", &s.max_inner);
  alg.get("max_ris_inner", &s.max_ris_inner);
  alg.get("solver_tol", &s.solver_tol);
  alg.get("spectral_power_surrogate", &s.spectral_power_surrogate);
  alg.get("joint_refinement", &s.joint_refinement);
  alg.get("max_joint_inner", &s.max_joint_inner);
  alg.finish();

  Section sw(root, "sweep");
  SweepSettings& t = cfg.sweep;
  sw.get("power_dbw", &t.power_dbw);
  sw.get("elements", &t.elements);
  sw.get("trials", &t.trials);
  sw.get("threads", &t.threads);
  std::vector<std::string> names;
  for (Scheme sc : t.schemes) names.emplace_back(to_string(sc));
  sw.get("schemes", &names);
  t.schemes.clear();
  for (const auto& n : names) t.schemes.push_back(scheme_from_string(n));
  sw.finish();

  validate(s);
  if (t.trials < 1) throw std::invalid_argument("sweep.trials must be at least 1");
  if (t.threads < 0) throw std::invalid_argument("sweep.threads must be nonnegative");
  if (t.schemes.empty()) throw std::invalid_argument("sweep.schemes must not be empty");
  for (int L : t.elements)
    if (L < 1) throw std::invalid_argument("sweep.elements must be positive");
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
  const ScenarioConfig& s = cfg.scenario;
  const SweepSettings& t = cfg.sweep;
  json root;
  root["seed"] = s.seed;
  root["system"] = {{"K", s.K}, {"N_T", s.N_T}, {"L", s.L}};
  root["geometry"] = {{"bs_pos", point_json(s.bs_pos)},
                      {"ris_pos", point_json(s.ris_pos)},
                      {"user_center", point_json(s.user_center)},
                      {"user_radius", s.user_radius}};
  root["path_loss"] = {{"L0_dB", s.L0_dB},
                       {"d0", s.d0},
                       {"alpha_bu", s.alpha_bu_list},
                       {"alpha_br", s.alpha_br},
                       {"alpha_ru", s.alpha_ru}};
  root["noise"] = {{"sigma_z2", s.sigma_z2}, {"sigma_k2", s.sigma_k2}};
  root["power"] = {{"P_bs_max", s.P_bs_max}, {"P_a_max", s.P_a_max}};
  root["qos"] = {{"R_min", s.R_min}};
  root["algorithm"] = {{"eps_outer", s.eps_outer},
                       {"eps_inner", s.eps_inner},
                       {"max_outer", s.max_outer},
                       {"max_inner", s.max_inner},
                       {"max_ris_inner", s.max_ris_inner},
                       {"solver_tol", s.solver_tol},
                       {"spectral_power_surrogate", s.spectral_power_surrogate},
                       {"joint_refinement", s.joint_refinement},
                       {"max_joint_inner", s.max_joint_inner}};
  json schemes = json::array();
  for (Scheme sc : t.schemes) schemes.push_back(to_string(sc));
  root["sweep"] = {{"power_dbw", t.power_dbw},
                   {"elements", t.elements},
                   {"trials", t.trials},
                   {"threads", t.threads},
                   {"schemes", schemes}};
  return root.dump(indent);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config '" + path + "'");
  out << config_to_json(cfg) << "\n";
}

}  // namespace risrsma
