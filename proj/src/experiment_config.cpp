#include "subdiff/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace subdiff {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::config, "config: " + what); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) config_error("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

}  // namespace

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::rate_m: return "rate_m";
    case ExperimentKind::rate_d: return "rate_d";
    case ExperimentKind::peeling: return "peeling";
    case ExperimentKind::landscape: return "landscape";
    case ExperimentKind::verify: return "verify";
  }
  return "?";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  for (auto k : {ExperimentKind::rate_m, ExperimentKind::rate_d, ExperimentKind::peeling, ExperimentKind::landscape,
                 ExperimentKind::verify}) {
    std::string n = experiment_kind_name(k);
    std::string dashed = n;
    for (auto& ch : dashed)
      if (ch == '_') ch = '-';
    if (name == n || name == dashed) return k;
  }
  config_error("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j,
             {"kind", "model", "loss", "pinball_alpha", "dims", "dims_grid", "m_grid", "m", "trials", "distribution",
              "noise", "x_bar", "ball", "probe_budget", "refine_starts", "refine_steps", "oracle", "m_pop", "seed",
              "peeling", "landscape", "verify"},
             "config");
  ExperimentConfig c;
  if (!j.contains("kind")) config_error("missing 'kind'");
  c.kind = experiment_kind_from_name(get<std::string>(j, "kind", "config"));
  if (!j.contains("seed")) config_error("missing 'seed'");
  c.seed = get<std::uint64_t>(j, "seed", "config");
  maybe(j, "model", c.model, "config");
  maybe(j, "loss", c.loss, "config");
  maybe(j, "pinball_alpha", c.pinball_alpha, "config");
  maybe(j, "dims", c.dims, "config");
  maybe(j, "dims_grid", c.dims_grid, "config");
  maybe(j, "m_grid", c.m_grid, "config");
  maybe(j, "m", c.m, "config");
  maybe(j, "trials", c.trials, "config");
  maybe(j, "probe_budget", c.probe_budget, "config");
  maybe(j, "refine_starts", c.refine_starts, "config");
  maybe(j, "refine_steps", c.refine_steps, "config");
  maybe(j, "oracle", c.oracle, "config");
  maybe(j, "m_pop", c.m_pop, "config");
  if (j.contains("x_bar")) c.x_bar = get<std::vector<double>>(j, "x_bar", "config");
  if (j.contains("distribution")) {
    const auto& d = j["distribution"];
    check_keys(d, {"type", "sigma"}, "distribution");
    maybe(d, "type", c.distribution, "distribution");
    maybe(d, "sigma", c.sigma, "distribution");
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    check_keys(n, {"type", "df", "scale"}, "noise");
    maybe(n, "type", c.noise, "noise");
    maybe(n, "df", c.noise_df, "noise");
    maybe(n, "scale", c.noise_scale, "noise");
  }
  if (j.contains("ball")) {
    const auto& b = j["ball"];
    check_keys(b, {"center", "radius"}, "ball");
    if (b.contains("center")) c.ball_center = get<std::vector<double>>(b, "center", "ball");
    maybe(b, "radius", c.ball_radius, "ball");
  }
  if (j.contains("peeling")) {
    const auto& p = j["peeling"];
    check_keys(p, {"radii", "directions"}, "peeling");
    maybe(p, "radii", c.radii, "peeling");
    maybe(p, "directions", c.directions, "peeling");
  }
  if (j.contains("landscape")) {
    const auto& l = j["landscape"];
    check_keys(l,
               {"starts", "saddle_fraction", "iterations", "stagnation_iterations", "polish", "merge_radius",
                "accept_radius", "spearman_max"},
               "landscape");
    auto& s = c.landscape;
    maybe(l, "starts", s.starts, "landscape");
    maybe(l, "saddle_fraction", s.saddle_fraction, "landscape");
    maybe(l, "iterations", s.iterations, "landscape");
    maybe(l, "stagnation_iterations", s.stagnation_iterations, "landscape");
    maybe(l, "polish", s.polish, "landscape");
    maybe(l, "merge_radius", s.merge_radius, "landscape");
    maybe(l, "accept_radius", s.accept_radius, "landscape");
    maybe(l, "spearman_max", s.spearman_max, "landscape");
  }
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    check_keys(v, {"remark_b_n", "random_pairs", "set_instances", "contraction_instances", "mutation"}, "verify");
    auto& s = c.verify;
    maybe(v, "remark_b_n", s.remark_b_n, "verify");
    maybe(v, "random_pairs", s.random_pairs, "verify");
    maybe(v, "set_instances", s.set_instances, "verify");
    maybe(v, "contraction_instances", s.contraction_instances, "verify");
    maybe(v, "mutation", s.mutation, "verify");
  }

  // Validation.
  if (c.trials < 1) config_error("trials must be >= 1");
  if (c.sigma <= 0.0) config_error("distribution sigma must be > 0");
  if (c.distribution != "gaussian" && c.distribution != "rademacher_cube")
    config_error("distribution type must be 'gaussian' or 'rademacher_cube'");
  if (c.noise != "none" && c.noise != "student_t") config_error("noise type must be 'none' or 'student_t'");
  if (c.oracle != "mega_sample" && c.oracle != "closed_form")
    config_error("oracle must be 'mega_sample' or 'closed_form'");
  if (c.ball_radius <= 0.0) config_error("ball radius must be > 0");
  if (c.probe_budget < 1) config_error("probe_budget must be >= 1");
  if (c.refine_starts < 0 || c.refine_steps < 0) config_error("refinement settings must be >= 0");
  if (c.verify.mutation != "none" && c.verify.mutation != "drop_reverse_deviation")
    config_error("verify mutation must be 'none' or 'drop_reverse_deviation'");

  std::int64_t max_m = 0;
  switch (c.kind) {
    case ExperimentKind::rate_m:
      if (c.dims.empty()) config_error("rate_m needs 'dims'");
      if (c.m_grid.size() < 4) config_error("rate_m needs an m_grid with at least 4 cells");
      for (auto m : c.m_grid) {
        if (m < 1) config_error("m_grid entries must be >= 1");
        max_m = std::max(max_m, m);
      }
      break;
    case ExperimentKind::rate_d:
      if (c.dims_grid.size() < 4) config_error("rate_d needs a dims_grid with at least 4 cells");
      if (c.m < 1) config_error("rate_d needs 'm' >= 1");
      max_m = c.m;
      break;
    case ExperimentKind::peeling:
      if (c.dims.empty()) config_error("peeling needs 'dims'");
      if (c.m < 1) config_error("peeling needs 'm' >= 1");
      if (c.radii.empty())
        for (int e = -4; e <= 0; ++e) c.radii.push_back(std::ldexp(1.0, e));
      if (c.radii.size() < 4) config_error("peeling needs at least 4 radii");
      for (double r : c.radii)
        if (r <= 0.0) config_error("peeling radii must be > 0");
      if (c.directions < 1) config_error("peeling directions must be >= 1");
      max_m = c.m;
      break;
    case ExperimentKind::landscape:
      if (c.model != "pr" || c.loss != "abs") config_error("landscape supports model 'pr' with loss 'abs' only");
      if (c.dims.size() != 1) config_error("landscape needs 'dims' = [d]");
      if (c.m_grid.size() < 2) config_error("landscape needs an m_grid with at least 2 cells");
      if (c.landscape.starts < 1) config_error("landscape starts must be >= 1");
      if (c.landscape.saddle_fraction < 0.0 || c.landscape.saddle_fraction > 1.0)
        config_error("landscape saddle_fraction must lie in [0, 1]");
      if (c.noise != "none") config_error("landscape requires noiseless data");
      break;
    case ExperimentKind::verify:
      break;
  }
  if ((c.kind == ExperimentKind::rate_m || c.kind == ExperimentKind::rate_d || c.kind == ExperimentKind::peeling) &&
      c.oracle == "mega_sample" && c.m_pop < 10 * max_m)
    config_error("m_pop must be at least 10 times the largest m");
  if (c.x_bar && c.kind == ExperimentKind::rate_d) config_error("x_bar cannot be fixed for rate_d");
  if (c.ball_center && c.kind == ExperimentKind::rate_d) config_error("ball center cannot be fixed for rate_d");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = experiment_kind_name(c.kind);
  j["model"] = c.model;
  j["loss"] = c.loss;
  j["pinball_alpha"] = c.pinball_alpha;
  j["dims"] = c.dims;
  j["dims_grid"] = c.dims_grid;
  j["m_grid"] = c.m_grid;
  j["m"] = c.m;
  j["trials"] = c.trials;
  j["distribution"] = {{"type", c.distribution}, {"sigma", c.sigma}};
  j["noise"] = {{"type", c.noise}, {"df", c.noise_df}, {"scale", c.noise_scale}};
  if (c.x_bar) j["x_bar"] = *c.x_bar;
  j["ball"] = {{"radius", c.ball_radius}};
  if (c.ball_center) j["ball"]["center"] = *c.ball_center;
  j["probe_budget"] = c.probe_budget;
  j["refine_starts"] = c.refine_starts;
  j["refine_steps"] = c.refine_steps;
  j["oracle"] = c.oracle;
  j["m_pop"] = c.m_pop;
  j["seed"] = c.seed;
  j["peeling"] = {{"radii", c.radii}, {"directions", c.directions}};
  const auto& l = c.landscape;
  j["landscape"] = {{"starts", l.starts},
                    {"saddle_fraction", l.saddle_fraction},
                    {"iterations", l.iterations},
                    {"stagnation_iterations", l.stagnation_iterations},
                    {"polish", l.polish},
                    {"merge_radius", l.merge_radius},
                    {"accept_radius", l.accept_radius},
                    {"spearman_max", l.spearman_max}};
  const auto& v = c.verify;
  j["verify"] = {{"remark_b_n", v.remark_b_n},
                 {"random_pairs", v.random_pairs},
                 {"set_instances", v.set_instances},
                 {"contraction_instances", v.contraction_instances},
                 {"mutation", v.mutation}};
  return j;
}

}  // namespace subdiff
