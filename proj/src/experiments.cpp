#include "subdiff/experiments.hpp"

#include "subdiff/landscape.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/subgradient_maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace subdiff {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTagXbar = 0x7ba2;
constexpr std::uint64_t kTagOracle = 0x909;
constexpr std::uint64_t kTagProbes = 0x9be;
constexpr std::uint64_t kTagTrial = 0x7a1;
constexpr std::uint64_t kTagDirections = 0xd1e;
constexpr std::uint64_t kTagStarts = 0x57a;

struct Setup {
  CompositeModel model;
  ScalarConvexLoss loss;
  DistributionSpec dist;
};

Setup make_setup(const ExperimentConfig& cfg, const std::vector<int>& dims) {
  try {
    CompositeModel model = CompositeModel::from_name(cfg.model, dims);
    ScalarConvexLoss loss = ScalarConvexLoss::builtin(cfg.loss, cfg.pinball_alpha);
    DistributionSpec dist = cfg.distribution == "gaussian" ? DistributionSpec::gaussian(cfg.sigma)
                                                           : DistributionSpec::rademacher_cube(cfg.sigma);
    if (cfg.noise == "student_t") {
      dist.noise.kind = NoiseSpec::Kind::student_t;
      dist.noise.df = cfg.noise_df;
      dist.noise.scale = cfg.noise_scale;
    }
    dist.validate();
    return {std::move(model), std::move(loss), std::move(dist)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    fail(ErrorCode::config, std::string("config: ") + e.what());
  }
}

Vector random_unit(int d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd;
  Vector v(d);
  do {
    for (int j = 0; j < d; ++j) v[j] = nd(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

Vector to_vector(const std::vector<double>& v, int d, const char* what) {
  if (static_cast<int>(v.size()) != d)
    fail(ErrorCode::config, std::string("config: ") + what + " has length " + std::to_string(v.size()) +
                                ", model dimension is " + std::to_string(d));
  return Eigen::Map<const Vector>(v.data(), d);
}

Vector ground_truth(const ExperimentConfig& cfg, int d) {
  if (cfg.x_bar) return to_vector(*cfg.x_bar, d, "x_bar");
  return random_unit(d, derive_seed(cfg.seed, kTagXbar, static_cast<std::uint64_t>(d)));
}

Vector ball_center(const ExperimentConfig& cfg, int d) {
  if (cfg.ball_center) return to_vector(*cfg.ball_center, d, "ball center");
  return Vector::Zero(d);
}

PopulationOracle make_oracle(const ExperimentConfig& cfg, const Setup& s, const Vector& x_bar, int threads) {
  if (cfg.oracle == "closed_form") {
    if (!PopulationOracle::closed_form_available(s.model, s.loss, s.dist))
      fail(ErrorCode::config, "config: no closed-form population oracle for this model/loss/distribution");
    return PopulationOracle::closed_form(s.model, s.loss, s.dist, x_bar);
  }
  return PopulationOracle::mega_sample(s.model, s.loss, s.dist, x_bar, cfg.m_pop,
                                       derive_seed(cfg.seed, kTagOracle, static_cast<std::uint64_t>(s.model.dim())),
                                       threads);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell, int trial) {
  return derive_seed(derive_seed(master, kTagTrial, cell), static_cast<std::uint64_t>(trial));
}

std::string fmt_int(long long v) { return std::to_string(v); }

std::vector<std::string> coord_header(int D) {
  std::vector<std::string> h;
  for (int j = 0; j < D; ++j) h.push_back("x" + std::to_string(j));
  return h;
}

void append_coords(std::vector<std::string>& row, const Vector& x, int D) {
  for (int j = 0; j < D; ++j) row.push_back(j < x.size() ? format_double(x[j]) : std::string());
}

json cells_json(const std::vector<CellSummary>& cells) {
  json a = json::array();
  for (const auto& c : cells)
    a.push_back({{"key", c.key}, {"median", c.median}, {"q1", c.q1}, {"q3", c.q3}, {"n", c.n}});
  return a;
}

json fit_json(const std::string& kind, const RateFit& f) {
  return {{"kind", kind}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"cells", cells_json(f.cells)}};
}

// One sup-gap measurement unit shared by the two rate experiments.
struct RateUnit {
  std::int64_t m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  SupGapResult sup;
  GapRecord at_argmax;
};

void run_rate_cell(const ExperimentConfig& cfg, const Setup& s, const Vector& x_bar, const PopulationOracle& oracle,
                   const ProbeSet& probes, std::vector<RateUnit>& units, int threads) {
  SupGapOptions opts;
  opts.refine_starts = cfg.refine_starts;
  opts.refine_steps = cfg.refine_steps;
  opts.threads = 1;
  parallel_for(units.size(), threads, [&](std::size_t i) {
    RateUnit& u = units[i];
    Dataset data = draw_dataset(s.model, s.dist, x_bar, u.m, u.seed, 1);
    EmpiricalObjective obj(s.model, s.loss, std::move(data));
    u.sup = sup_gap_over_ball(obj, oracle, probes, opts);
    u.at_argmax = pointwise_gap(obj, oracle, u.sup.argmax);
  });
}

std::vector<std::string> rate_header(int D) {
  std::vector<std::string> h = {"model",    "loss",        "m",           "d",       "trial",
                                "master_seed", "trial_seed", "sup_gap",  "gap_selection", "gap_hausdorff",
                                "hausdorff_exact", "oracle_err", "evaluations"};
  for (auto& c : coord_header(D)) h.push_back(c);
  return h;
}

std::vector<std::string> rate_row(const ExperimentConfig& cfg, const Setup& s, const RateUnit& u, int D) {
  std::vector<std::string> row = {cfg.model,
                                  cfg.loss,
                                  fmt_int(u.m),
                                  fmt_int(s.model.dim()),
                                  fmt_int(u.trial),
                                  std::to_string(cfg.seed),
                                  std::to_string(u.seed),
                                  format_double(u.sup.value),
                                  format_double(u.at_argmax.gap_selection),
                                  format_double(u.at_argmax.gap_hausdorff),
                                  u.at_argmax.hausdorff_exact ? "1" : "0",
                                  format_double(std::max(u.sup.oracle_err, u.at_argmax.oracle_err)),
                                  fmt_int(static_cast<long long>(u.sup.evaluations))};
  append_coords(row, u.sup.argmax, D);
  return row;
}

ExperimentResult run_rate_m(const ExperimentConfig& cfg, int threads) {
  const Setup s = make_setup(cfg, cfg.dims);
  const int d = s.model.dim();
  const Vector x_bar = ground_truth(cfg, d);
  const PopulationOracle oracle = make_oracle(cfg, s, x_bar, threads);
  const ProbeSet probes = make_probe_set(oracle, ball_center(cfg, d), cfg.ball_radius, cfg.probe_budget,
                                         derive_seed(cfg.seed, kTagProbes, static_cast<std::uint64_t>(d)), threads);

  std::vector<RateUnit> units;
  for (auto m : cfg.m_grid)
    for (int t = 0; t < cfg.trials; ++t) units.push_back({m, t, trial_seed(cfg.seed, static_cast<std::uint64_t>(m), t), {}, {}});
  run_rate_cell(cfg, s, x_bar, oracle, probes, units, threads);

  ExperimentResult res;
  res.header = rate_header(d);
  std::vector<CellSummary> cells;
  for (auto m : cfg.m_grid) {
    std::vector<double> vals;
    for (const auto& u : units)
      if (u.m == m) vals.push_back(u.sup.value);
    cells.push_back(summarize_cell(static_cast<double>(m), vals));
  }
  for (const auto& u : units) res.rows.push_back(rate_row(cfg, s, u, d));
  res.rate = fit_loglog(cells);
  res.fit = fit_json("rate_m", *res.rate);
  res.fit["model"] = cfg.model;
  res.fit["d"] = d;
  return res;
}

ExperimentResult run_rate_d(const ExperimentConfig& cfg, int threads) {
  ExperimentResult res;
  int Dmax = 0;
  std::vector<Setup> setups;
  for (const auto& dims : cfg.dims_grid) {
    setups.push_back(make_setup(cfg, dims));
    Dmax = std::max(Dmax, setups.back().model.dim());
  }
  res.header = rate_header(Dmax);
  std::vector<CellSummary> cells;
  for (const auto& s : setups) {
    const int d = s.model.dim();
    const Vector x_bar = ground_truth(cfg, d);
    const PopulationOracle oracle = make_oracle(cfg, s, x_bar, threads);
    const ProbeSet probes = make_probe_set(oracle, Vector::Zero(d), cfg.ball_radius, cfg.probe_budget,
                                           derive_seed(cfg.seed, kTagProbes, static_cast<std::uint64_t>(d)), threads);
    std::vector<RateUnit> units;
    const std::uint64_t cell = (static_cast<std::uint64_t>(d) << 40) ^ static_cast<std::uint64_t>(cfg.m);
    for (int t = 0; t < cfg.trials; ++t) units.push_back({cfg.m, t, trial_seed(cfg.seed, cell, t), {}, {}});
    run_rate_cell(cfg, s, x_bar, oracle, probes, units, threads);
    std::vector<double> vals;
    for (const auto& u : units) {
      vals.push_back(u.sup.value);
      res.rows.push_back(rate_row(cfg, s, u, Dmax));
    }
    cells.push_back(summarize_cell(static_cast<double>(d), vals));
  }
  res.rate = fit_loglog(cells);
  res.fit = fit_json("rate_d", *res.rate);
  bool monotone = true;
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (cells[i].median < cells[i - 1].median) monotone = false;
  res.fit["medians_monotone"] = monotone;
  res.fit["m"] = cfg.m;
  res.fit["model"] = cfg.model;
  return res;
}

ExperimentResult run_peeling(const ExperimentConfig& cfg, int threads) {
  const Setup s = make_setup(cfg, cfg.dims);
  const int d = s.model.dim();
  const Vector x_bar = ground_truth(cfg, d);
  const PopulationOracle oracle = make_oracle(cfg, s, x_bar, threads);

  std::vector<Vector> dirs;
  for (int k = 0; k < cfg.directions; ++k)
    dirs.push_back(random_unit(d, derive_seed(cfg.seed, kTagDirections, static_cast<std::uint64_t>(k))));
  // Probe list per trial: x = 0 first, then radius-major over directions.
  std::vector<std::pair<double, int>> probes = {{0.0, -1}};
  for (double r : cfg.radii)
    for (int k = 0; k < cfg.directions; ++k) probes.push_back({r, k});

  struct Unit {
    int trial;
    std::uint64_t seed;
    std::vector<GapRecord> recs;
  };
  std::vector<Unit> units;
  for (int t = 0; t < cfg.trials; ++t)
    units.push_back({t, trial_seed(cfg.seed, static_cast<std::uint64_t>(cfg.m), t), {}});
  parallel_for(units.size(), threads, [&](std::size_t i) {
    Unit& u = units[i];
    EmpiricalObjective obj(s.model, s.loss, draw_dataset(s.model, s.dist, x_bar, cfg.m, u.seed, 1));
    for (const auto& [r, k] : probes) {
      const Vector x = k < 0 ? Vector::Zero(d) : Vector(r * dirs[static_cast<std::size_t>(k)]);
      u.recs.push_back(pointwise_gap(obj, oracle, x));
    }
  });

  ExperimentResult res;
  res.header = {"model", "loss", "m", "d", "trial", "direction", "radius", "master_seed", "trial_seed",
                "gap_selection", "gap_hausdorff", "hausdorff_exact", "oracle_err"};
  for (auto& c : coord_header(d)) res.header.push_back(c);
  double gap_at_zero = 0.0;
  std::vector<std::vector<double>> by_radius(cfg.radii.size());
  for (const auto& u : units) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto& rec = u.recs[p];
      const auto [r, k] = probes[p];
      if (k < 0) {
        gap_at_zero = std::max(gap_at_zero, rec.gap_selection);
      } else {
        const auto ri = static_cast<std::size_t>(std::find(cfg.radii.begin(), cfg.radii.end(), r) - cfg.radii.begin());
        by_radius[ri].push_back(rec.gap_selection);
      }
      std::vector<std::string> row = {cfg.model,
                                      cfg.loss,
                                      fmt_int(cfg.m),
                                      fmt_int(d),
                                      fmt_int(u.trial),
                                      fmt_int(k),
                                      format_double(r),
                                      std::to_string(cfg.seed),
                                      std::to_string(u.seed),
                                      format_double(rec.gap_selection),
                                      format_double(rec.gap_hausdorff),
                                      rec.hausdorff_exact ? "1" : "0",
                                      format_double(rec.oracle_err)};
      append_coords(row, rec.x, d);
      res.rows.push_back(std::move(row));
    }
  }
  std::vector<CellSummary> cells;
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) cells.push_back(summarize_cell(cfg.radii[i], by_radius[i]));
  std::sort(cells.begin(), cells.end(), [](const CellSummary& a, const CellSummary& b) { return a.key < b.key; });
  res.rate = fit_loglog(cells);
  res.fit = fit_json("peeling", *res.rate);
  res.fit["gap_at_zero"] = gap_at_zero;
  json ratios = json::array();
  for (std::size_t i = 1; i < cells.size(); ++i)
    ratios.push_back({{"from", cells[i - 1].key},
                      {"to", cells[i].key},
                      {"ratio", cells[i].median / cells[i - 1].median}});
  res.fit["median_ratios"] = ratios;
  return res;
}

std::vector<Vector> landscape_starts(const Vector& x_bar, int count, std::uint64_t seed, bool saddle) {
  const int d = static_cast<int>(x_bar.size());
  const double nb = x_bar.norm();
  const Vector u = x_bar / nb;
  const double rho = population_stationary_set(x_bar).rho;
  Rng rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) {
    Vector g(d);
    for (int j = 0; j < d; ++j) g[j] = nd(rng);
    if (saddle) {
      // near the ring, or near the origin for every fifth start
      Vector w = g - g.dot(u) * u;
      if (w.norm() == 0.0) w = Vector::Unit(d, (d > 1 && std::abs(u[0]) > 0.5) ? 1 : 0);
      w /= w.norm();
      Vector jitter(d);
      for (int j = 0; j < d; ++j) jitter[j] = nd(rng);
      const double scale = 0.1 * nb / std::sqrt(static_cast<double>(d));
      if (i % 5 == 4)
        out.push_back(0.5 * scale * jitter);
      else
        out.push_back(rho * w + scale * jitter);
    } else {
      const double rad = nb * (0.1 + 1.9 * ud(rng));
      out.push_back(rad * g / g.norm());
    }
  }
  return out;
}

ExperimentResult run_landscape(const ExperimentConfig& cfg, int threads) {
  const Setup s = make_setup(cfg, cfg.dims);
  const int d = s.model.dim();
  const Vector x_bar = ground_truth(cfg, d);
  const double nb = x_bar.norm();
  const auto& L = cfg.landscape;
  const int n_saddle = static_cast<int>(std::lround(L.saddle_fraction * L.starts));
  const int n_descent = L.starts - n_saddle;

  struct Unit {
    std::int64_t m;
    int trial;
    std::uint64_t seed;
    std::vector<StationaryPointReport> reports;
    std::vector<int> modes;
    double D = 0.0;
    int successes = 0;
  };
  std::vector<Unit> units;
  for (auto m : cfg.m_grid)
    for (int t = 0; t < cfg.trials; ++t)
      units.push_back({m, t, trial_seed(cfg.seed, static_cast<std::uint64_t>(m), t), {}, {}, 0.0, 0});

  parallel_for(units.size(), threads, [&](std::size_t i) {
    Unit& u = units[i];
    EmpiricalObjective obj(s.model, s.loss, draw_dataset(s.model, s.dist, x_bar, u.m, u.seed, 1));
    StationaryConfig sc;
    sc.x_bar = x_bar;
    sc.iterations = L.iterations;
    sc.stagnation_iterations = L.stagnation_iterations;
    sc.polish = L.polish;
    sc.threads = 1;
    const std::uint64_t sseed = derive_seed(u.seed, kTagStarts);
    if (n_descent > 0) {
      sc.mode = StationaryMode::descent;
      for (auto& r : find_stationary_points(obj, landscape_starts(x_bar, n_descent, sseed, false), sc)) {
        u.reports.push_back(std::move(r));
        u.modes.push_back(0);
      }
    }
    if (n_saddle > 0) {
      sc.mode = StationaryMode::saddle;
      for (auto& r : find_stationary_points(obj, landscape_starts(x_bar, n_saddle, sseed + 1, true), sc)) {
        r.start_index += n_descent;
        u.reports.push_back(std::move(r));
        u.modes.push_back(1);
      }
    }
    for (const auto& r : u.reports) u.successes += r.success ? 1 : 0;
    if (u.successes > 0) u.D = deviation_ZS_to_Z(u.reports, x_bar, L.merge_radius * nb);
  });

  ExperimentResult res;
  res.header = {"model", "loss", "m", "d", "trial", "start", "mode", "master_seed", "trial_seed",
                "residual", "iterations", "success", "dist_to_Z"};
  for (auto& c : coord_header(d)) res.header.push_back(c);
  double worst_accepted = 0.0;
  int total_success = 0, total = 0;
  std::vector<CellSummary> cells;
  for (auto m : cfg.m_grid) {
    std::vector<double> Ds;
    for (const auto& u : units) {
      if (u.m != m) continue;
      if (u.successes > 0) Ds.push_back(u.D);
      for (std::size_t k = 0; k < u.reports.size(); ++k) {
        const auto& r = u.reports[k];
        ++total;
        if (r.success) {
          ++total_success;
          worst_accepted = std::max(worst_accepted, r.dist_to_Z);
        }
        std::vector<std::string> row = {cfg.model,
                                        cfg.loss,
                                        fmt_int(u.m),
                                        fmt_int(d),
                                        fmt_int(u.trial),
                                        fmt_int(r.start_index),
                                        u.modes[k] ? "saddle" : "descent",
                                        std::to_string(cfg.seed),
                                        std::to_string(u.seed),
                                        format_double(r.residual),
                                        fmt_int(r.iterations),
                                        r.success ? "1" : "0",
                                        format_double(r.dist_to_Z)};
        append_coords(row, r.x, d);
        res.rows.push_back(std::move(row));
      }
    }
    if (!Ds.empty()) cells.push_back(summarize_cell(static_cast<double>(m), Ds));
  }

  std::vector<double> keys, meds;
  for (const auto& c : cells) {
    keys.push_back(c.key);
    meds.push_back(c.median);
  }
  const double rho_s = keys.size() >= 2 ? spearman(keys, meds) : 0.0;
  const double c_const = solve_c_constant();
  res.fit = {{"kind", "landscape"},
             {"cells", cells_json(cells)},
             {"spearman", rho_s},
             {"spearman_max", L.spearman_max},
             {"worst_accepted_dist", worst_accepted / nb},
             {"accept_radius", L.accept_radius},
             {"accepted", total_success},
             {"terminals", total},
             {"c", c_const},
             {"c_residual", std::abs(c_equation(c_const))}};
  bool positive = cells.size() >= 4;
  for (double v : meds) positive = positive && v > 0.0;
  if (positive) {
    res.rate = fit_loglog(cells);
    res.fit["slope"] = res.rate->slope;
    res.fit["intercept"] = res.rate->intercept;
    res.fit["r2"] = res.rate->r2;
  } else {
    res.fit["slope"] = nullptr;
    res.fit["intercept"] = nullptr;
    res.fit["r2"] = nullptr;
  }
  return res;
}

ExperimentResult run_verify(const ExperimentConfig& cfg, int threads) {
  HausdorffFn fn;
  if (cfg.verify.mutation == "drop_reverse_deviation")
    fn = [](const ConvexBody& a, const ConvexBody& b) { return deviation(a, b); };
  else
    fn = [](const ConvexBody& a, const ConvexBody& b) { return hausdorff(a, b); };
  ExperimentResult res;
  res.checks = run_verify_suite(cfg.verify, cfg.seed, fn, threads);
  res.header = {"module", "check", "passed", "value", "tolerance", "master_seed", "detail"};
  json checks = json::array();
  for (const auto& c : res.checks) {
    res.passed = res.passed && c.passed;
    res.rows.push_back({c.module, c.name, c.passed ? "1" : "0", format_double(c.value), format_double(c.tolerance),
                        std::to_string(cfg.seed), c.detail});
    checks.push_back({{"module", c.module},
                      {"check", c.name},
                      {"passed", c.passed},
                      {"value", c.value},
                      {"tolerance", c.tolerance}});
  }
  res.fit = {{"kind", "verify"}, {"passed", res.passed}, {"checks", checks},
             {"slope", nullptr}, {"intercept", nullptr}, {"r2", nullptr}, {"cells", json::array()}};
  return res;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  threads = std::max(1, threads);
  switch (cfg.kind) {
    case ExperimentKind::rate_m: return run_rate_m(cfg, threads);
    case ExperimentKind::rate_d: return run_rate_d(cfg, threads);
    case ExperimentKind::peeling: return run_peeling(cfg, threads);
    case ExperimentKind::landscape: return run_landscape(cfg, threads);
    case ExperimentKind::verify: return run_verify(cfg, threads);
  }
  fail(ErrorCode::internal, "run_experiment: unknown kind");
}

std::string records_csv(const ExperimentResult& res) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
    os << '\n';
  };
  line(res.header);
  for (const auto& r : res.rows) line(r);
  return os.str();
}

void write_outputs(const ExperimentResult& res, const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + out_dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    const fs::path p = fs::path(out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorCode::io, "cannot write '" + p.string() + "'");
    f << text;
    if (!f) fail(ErrorCode::io, "write failed for '" + p.string() + "'");
  };
  write("records.csv", records_csv(res));
  write("fit.json", res.fit.dump(2) + "\n");
  write("config.echo.json", config_to_json(cfg).dump(2) + "\n");
}

}  // namespace subdiff
