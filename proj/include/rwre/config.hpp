#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwre/env_model.hpp"
#include "rwre/errors.hpp"
#include "rwre/experiment.hpp"

namespace rwre {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown field \"" + key + "\" in " + context);
  }
}

inline double require_number(const json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key)) throw ConfigError("missing field \"" + key + "\" in " + context);
  if (!obj[key].is_number()) throw ConfigError("field \"" + key + "\" in " + context + " must be a number");
  return obj[key].get<double>();
}

inline std::array<double, 2> interval(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError("theta_box entry \"" + key + "\" must be [lo, hi]");
  const double lo = v[0].get<double>(), hi = v[1].get<double>();
  if (!(lo <= hi)) throw ConfigError("theta_box entry \"" + key + "\" has lo > hi");
  return {lo, hi};
}

}  // namespace detail

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

// Family section of a config, e.g.
//   {"family":"two_point_known","a1":0.4,"a2":0.7,"p":0.3,
//    "theta_box":{"p":[0.001,0.999]}}
inline EnvFamily parse_family(const json& j) {
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError("config needs a \"family\" string");
  const std::string name = j["family"].get<std::string>();

  auto box_from = [&](const FamilyShape& shape) -> ThetaBox {
    ThetaBox box = default_theta_box(shape.kind);
    if (!j.contains("theta_box")) return box;
    const json& tb = j["theta_box"];
    if (!tb.is_object()) throw ConfigError("theta_box must be an object");
    std::set<std::string> allowed;
    for (int i = 0; i < shape.dim(); ++i) allowed.insert(shape.param_name(i));
    detail::check_keys(tb, allowed, "theta_box");
    for (int i = 0; i < shape.dim(); ++i) {
      const std::string key = shape.param_name(i);
      if (tb.contains(key)) box.iv[static_cast<std::size_t>(i)] = detail::interval(tb[key], key);
    }
    return box;
  };

  try {
    if (name == "two_point_known") {
      const double a1 = detail::require_number(j, "a1", "two_point_known config");
      const double a2 = detail::require_number(j, "a2", "two_point_known config");
      const double p = detail::require_number(j, "p", "two_point_known config");
      FamilyShape shape{FamilyKind::two_point_known, a1, a2};
      return make_two_point_known(a1, a2, p, box_from(shape));
    }
    if (name == "two_point_free") {
      const double p = detail::require_number(j, "p", "two_point_free config");
      const double a1 = detail::require_number(j, "a1", "two_point_free config");
      const double a2 = detail::require_number(j, "a2", "two_point_free config");
      FamilyShape shape{FamilyKind::two_point_free, 0.0, 0.0};
      return make_two_point_free(p, a1, a2, box_from(shape));
    }
    if (name == "beta") {
      const double alpha = detail::require_number(j, "alpha", "beta config");
      const double beta = detail::require_number(j, "beta", "beta config");
      FamilyShape shape{FamilyKind::beta, 0.0, 0.0};
      return make_beta(alpha, beta, box_from(shape));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown family \"" + name + "\"");
}

inline const std::set<std::string>& family_keys() {
  static const std::set<std::string> keys = {"family", "p",     "a1",        "a2",
                                             "alpha",  "beta",  "theta_box"};
  return keys;
}

// Full experiment config: family fields plus harness fields, all optional
// beyond the family itself. Unknown fields are rejected.
inline ExperimentConfig parse_experiment_config(const json& j) {
  std::set<std::string> allowed = family_keys();
  for (const char* k : {"n_grid", "replications", "estimators", "site_margin", "master_seed",
                        "outlier_policy", "max_steps"})
    allowed.insert(k);
  detail::check_keys(j, allowed, "config");

  ExperimentConfig cfg;
  cfg.family = parse_family(j);
  cfg.outliers = OutlierPolicy::defaults_for(cfg.family.kind());
  if (cfg.family.kind() == FamilyKind::two_point_free) cfg.run_moment = false;

  if (j.contains("n_grid")) {
    if (!j["n_grid"].is_array()) throw ConfigError("n_grid must be an array");
    cfg.n_grid.clear();
    for (const auto& v : j["n_grid"]) {
      if (!v.is_number_integer()) throw ConfigError("n_grid entries must be integers");
      cfg.n_grid.push_back(v.get<long>());
    }
  }
  if (j.contains("replications")) cfg.replications = j["replications"].get<int>();
  if (j.contains("site_margin")) cfg.site_margin = j["site_margin"].get<long>();
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("max_steps")) cfg.max_steps_override = j["max_steps"].get<long long>();
  if (j.contains("estimators")) {
    if (!j["estimators"].is_array()) throw ConfigError("estimators must be an array");
    cfg.run_mle = false;
    cfg.run_moment = false;
    for (const auto& v : j["estimators"]) {
      const std::string name = v.get<std::string>();
      if (name == "mle")
        cfg.run_mle = true;
      else if (name == "moment")
        cfg.run_moment = true;
      else
        throw ConfigError("unknown estimator \"" + name + "\"");
    }
  }
  if (j.contains("outlier_policy")) {
    const json& op = j["outlier_policy"];
    detail::check_keys(op, {"exclude_boundary", "exclude_clamped", "caps"}, "outlier_policy");
    if (op.contains("exclude_boundary")) cfg.outliers.exclude_boundary = op["exclude_boundary"].get<bool>();
    if (op.contains("exclude_clamped")) cfg.outliers.exclude_clamped = op["exclude_clamped"].get<bool>();
    if (op.contains("caps")) {
      std::set<std::string> coord_names;
      for (int i = 0; i < cfg.family.shape.dim(); ++i)
        coord_names.insert(cfg.family.shape.param_name(i));
      detail::check_keys(op["caps"], coord_names, "outlier_policy.caps");
      cfg.outliers.moment_caps.clear();
      for (const auto& [key, value] : op["caps"].items())
        cfg.outliers.moment_caps[key] = value.get<double>();
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline json family_to_json(const EnvFamily& f) {
  json j;
  j["family"] = family_name(f.kind());
  switch (f.kind()) {
    case FamilyKind::two_point_known:
      j["a1"] = f.a1();
      j["a2"] = f.a2();
      j["p"] = f.p();
      break;
    case FamilyKind::two_point_free:
      j["p"] = f.p();
      j["a1"] = f.a1();
      j["a2"] = f.a2();
      break;
    case FamilyKind::beta:
      j["alpha"] = f.alpha();
      j["beta"] = f.beta_par();
      break;
  }
  json tb;
  for (int i = 0; i < f.shape.dim(); ++i)
    tb[f.shape.param_name(i)] = {f.box.lo(static_cast<std::size_t>(i)), f.box.hi(static_cast<std::size_t>(i))};
  j["theta_box"] = tb;
  return j;
}

inline json experiment_config_to_json(const ExperimentConfig& cfg) {
  json j = family_to_json(cfg.family);
  j["n_grid"] = cfg.n_grid;
  j["replications"] = cfg.replications;
  j["site_margin"] = cfg.site_margin;
  json est = json::array();
  if (cfg.run_mle) est.push_back("mle");
  if (cfg.run_moment) est.push_back("moment");
  j["estimators"] = est;
  json op;
  op["exclude_boundary"] = cfg.outliers.exclude_boundary;
  op["exclude_clamped"] = cfg.outliers.exclude_clamped;
  json caps;
  for (const auto& [key, value] : cfg.outliers.moment_caps) caps[key] = value;
  op["caps"] = caps;
  j["outlier_policy"] = op;
  if (cfg.max_steps_override > 0) j["max_steps"] = cfg.max_steps_override;
  return j;
}

}  // namespace rwre
