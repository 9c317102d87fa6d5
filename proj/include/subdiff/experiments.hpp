#ifndef SUBDIFF_EXPERIMENTS_HPP
#define SUBDIFF_EXPERIMENTS_HPP

// Config-driven experiment runners: rate in m, rate in d, peeling,
// landscape sweep and the verification suite.

#include "subdiff/set_calculus.hpp"
#include "subdiff/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subdiff {

enum class ExperimentKind { rate_m, rate_d, peeling, landscape, verify };

std::string experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& name);

struct LandscapeSettings {
  int starts = 50;
  double saddle_fraction = 0.5;
  int iterations = 10000;
  int stagnation_iterations = 5000;
  bool polish = true;
  double merge_radius = 1e-2;   // relative to |xb|
  double accept_radius = 0.2;   // relative to |xb|
  double spearman_max = -0.8;
};

struct VerifySettings {
  int remark_b_n = 100;
  int random_pairs = 1000;
  int set_instances = 200;
  int contraction_instances = 1000;
  std::string mutation = "none";  // or "drop_reverse_deviation"
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::verify;
  std::string model = "pr";
  std::string loss = "abs";
  double pinball_alpha = 0.5;
  std::vector<int> dims;                     // model shape
  std::vector<std::vector<int>> dims_grid;   // rate_d shapes
  std::vector<std::int64_t> m_grid;          // rate_m, landscape
  std::int64_t m = 0;                        // rate_d, peeling
  int trials = 1;
  std::string distribution = "gaussian";
  double sigma = 1.0;
  std::string noise = "none";
  double noise_df = 3.0;
  double noise_scale = 0.0;
  std::optional<std::vector<double>> x_bar;  // default: seeded random unit vector
  std::optional<std::vector<double>> ball_center;  // default: origin
  double ball_radius = 1.0;
  int probe_budget = 200;
  int refine_starts = 10;
  int refine_steps = 100;
  std::string oracle = "mega_sample";  // or "closed_form"
  std::int64_t m_pop = 1000000;
  std::uint64_t seed = 0;
  std::vector<double> radii;                 // peeling
  int directions = 20;                       // peeling
  LandscapeSettings landscape;
  VerifySettings verify;
};

// Strict parsing: unknown keys, missing seed, or invalid values raise
// Error(ErrorCode::config).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ExperimentResult {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // sorted before writing
  nlohmann::json fit;
  std::optional<RateFit> rate;
  std::vector<CheckResult> checks;             // verify only
  bool passed = true;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1);

std::string records_csv(const ExperimentResult& res);
// records.csv, fit.json, config.echo.json
void write_outputs(const ExperimentResult& res, const ExperimentConfig& cfg, const std::string& out_dir);

using HausdorffFn = std::function<SetDistance(const ConvexBody&, const ConvexBody&)>;
std::vector<CheckResult> run_verify_suite(const VerifySettings& s, std::uint64_t seed, const HausdorffFn& hausdorff_fn,
                                          int threads = 1);

std::string format_double(double v);

}  // namespace subdiff

#endif
