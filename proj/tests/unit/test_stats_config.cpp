#include <doctest.h>

#include "subdiff/experiments.hpp"
#include "subdiff/stats.hpp"

#include <cmath>

using namespace subdiff;
using nlohmann::json;

TEST_CASE("quantiles") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(quantile({0.0, 10.0}, 0.25) == 2.5);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
  const auto c = summarize_cell(8.0, {1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(c.median == 3.0);
  CHECK(c.q1 == 2.0);
  CHECK(c.q3 == 4.0);
  CHECK(c.n == 5);
}

TEST_CASE("log-log fit recovers a power law") {
  std::vector<double> k, v;
  for (double m = 128; m <= 8192; m *= 2) {
    k.push_back(m);
    v.push_back(3.0 * std::pow(m, -0.5));
  }
  const RateFit f = fit_loglog(k, v);
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}), Error);
}

TEST_CASE("spearman") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
}

TEST_CASE("config parsing is strict") {
  const json base = {{"kind", "rate_m"}, {"model", "pr"},     {"dims", {3}},
                     {"m_grid", {16, 32, 64, 128}}, {"trials", 2}, {"seed", 5}};
  const ExperimentConfig cfg = parse_config(base);
  CHECK(cfg.kind == ExperimentKind::rate_m);
  CHECK(cfg.m_grid.size() == 4);
  CHECK(cfg.seed == 5);

  json extra = base;
  extra["bogus"] = 1;
  CHECK_THROWS_AS(parse_config(extra), Error);
  json noseed = base;
  noseed.erase("seed");
  CHECK_THROWS_AS(parse_config(noseed), Error);
  json few = base;
  few["m_grid"] = {16, 32};
  CHECK_THROWS_AS(parse_config(few), Error);
  json badtype = base;
  badtype["trials"] = "many";
  CHECK_THROWS_AS(parse_config(badtype), Error);
  json nested = base;
  nested["distribution"] = {{"type", "gaussian"}, {"sgima", 1.0}};
  CHECK_THROWS_AS(parse_config(nested), Error);
  try {
    parse_config(extra);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
  }
}

TEST_CASE("config echo round-trips") {
  const json base = {{"kind", "peeling"}, {"model", "bd"}, {"dims", {2, 2}}, {"m", 64}, {"trials", 1},
                     {"seed", 9},        {"m_pop", 1000}};
  const ExperimentConfig a = parse_config(base);
  const ExperimentConfig b = parse_config(config_to_json(a));
  CHECK(config_to_json(a) == config_to_json(b));
  CHECK(b.radii.size() >= 4);
}

TEST_CASE("kind names") {
  CHECK(experiment_kind_from_name("rate-m") == ExperimentKind::rate_m);
  CHECK(experiment_kind_from_name("rate_d") == ExperimentKind::rate_d);
  CHECK(experiment_kind_name(ExperimentKind::landscape) == "landscape");
  CHECK_THROWS_AS(experiment_kind_from_name("nope"), Error);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
}
