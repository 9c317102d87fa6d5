#include "../support/oracles.hpp"

#include <doctest.h>

#include "subdiff/analytic_1d.hpp"

#include <cmath>

using namespace subdiff;

TEST_CASE("piecewise-linear evaluation and subdifferential") {
  const PiecewiseLinearConvexFn f({-1.0, 1.0}, {-2.0, 0.0, 3.0}, 0.5);
  CHECK(f.value(0.0) == 0.5);
  CHECK(f.value(2.0) == doctest::Approx(3.5));
  CHECK(f.value(-2.0) == doctest::Approx(2.5));
  CHECK(f.exact_subdiff(-1.0).lo == -2.0);
  CHECK(f.exact_subdiff(-1.0).hi == 0.0);
  CHECK(f.exact_subdiff(0.3).lo == 0.0);
  CHECK(f.right_derivative(1.0) == 3.0);
  CHECK_THROWS_AS(PiecewiseLinearConvexFn({0.0}, {1.0, 0.0}), Error);
  const auto loss = f.to_loss();
  for (double z : {-3.0, -1.0, 0.2, 1.0, 4.0}) CHECK(loss.eval(z) == doctest::Approx(f.value(z)));
}

TEST_CASE("abs and twice abs at zero") {
  const auto f1 = PiecewiseLinearConvexFn::abs_sum({{1.0, 0.0}});
  const auto f2 = PiecewiseLinearConvexFn::abs_sum({{2.0, 0.0}});
  CHECK(interval_hausdorff(f1.exact_subdiff(0.0), f2.exact_subdiff(0.0)) == 1.0);
  CHECK(d1_on_points(f1, f2, {0.0}) == 1.0);
  const SelectionRule zero = [](const PiecewiseLinearConvexFn& f, double x) {
    return x == 0.0 ? 0.0 : f.right_derivative(x);
  };
  CHECK(selection_diff_on_points(f1, f2, {0.0}, zero, zero) == 0.0);
  for (double eps : {1.0, 1e-3, 1e-9}) {
    CHECK(d1_metric(f1, f2, -eps, eps) <= selection_sup_diff(f1, f2, -eps, eps) + 1e-12);
    CHECK(d1_metric(f1, f2, -eps, eps) <= selection_sup_diff(f1, f2, -eps, eps, zero, zero) + 1e-12);
  }
}

TEST_CASE("invalid selection rules are rejected") {
  const auto f = PiecewiseLinearConvexFn::abs_sum({{1.0, 0.0}});
  const SelectionRule bad = [](const PiecewiseLinearConvexFn&, double) { return 5.0; };
  CHECK_THROWS_AS(selection_sup_diff(f, f, -1.0, 1.0, bad, right_derivative_rule), Error);
}

TEST_CASE("d1 and d2 on the shrinking pair") {
  for (int n : {1, 2, 3, 10, 37, 100}) {
    const auto f1 = remark_b_f1(n), f2 = remark_b_f2(n);
    CHECK(std::abs(d1_metric(f1, f2, -2.0, 2.0) - 1.0) <= 1e-12);
    CHECK(std::abs(d2_graph_metric(f1, f2, -2.0, 2.0) - 1.0 / n) <= 1e-12);
    CHECK(oracle::sampled_d2(f1, f2, -2.0, 2.0, 4000) == doctest::Approx(1.0 / n).epsilon(0.02));
  }
}

TEST_CASE("exact metrics agree with dense sampling") {
  Rng rng(51);
  for (int it = 0; it < 40; ++it) {
    const auto p = random_pl_convex(rng, -1.0, 1.0, 4);
    const auto q = random_pl_convex(rng, -1.0, 1.0, 4);
    const double d1 = d1_metric(p, q, -1.0, 1.0);
    const double d2 = d2_graph_metric(p, q, -1.0, 1.0);
    const double s1 = oracle::sampled_d1(p, q, -1.0, 1.0, 20000);
    CHECK(s1 <= d1 + 1e-12);
    // open window: breakpoints are attained exactly only when on the grid
    double at_bp = 0.0;
    for (double x : d1_candidates(p, q, -1.0, 1.0))
      at_bp = std::max(at_bp, interval_hausdorff(p.exact_subdiff(x), q.exact_subdiff(x)));
    CHECK(std::abs(at_bp - d1) <= 1e-12);
    CHECK(std::abs(oracle::sampled_d2(p, q, -1.0, 1.0, 800) - d2) <= 0.02);
    CHECK(d2 <= d1 + 1e-12);
    CHECK(d1 <= selection_sup_diff(p, q, -1.0, 1.0) + 1e-12);
  }
}

TEST_CASE("random selection rules stay inside the subdifferential") {
  Rng rng(52);
  const auto f = random_pl_convex(rng, -1.0, 1.0, 5);
  const auto g = random_selection_rule(9);
  for (double x : f.breakpoints()) {
    CHECK(f.exact_subdiff(x).contains(g(f, x), 1e-12));
    CHECK(g(f, x) == g(f, x));
  }
  CHECK(g(f, 0.123456) == doctest::Approx(f.right_derivative(0.123456)));
}

TEST_CASE("graph segments") {
  const auto f = PiecewiseLinearConvexFn::abs_sum({{1.0, 0.0}});
  const auto segs = subdiff_graph(f, -1.0, 1.0);
  CHECK(segs.size() == 3);
  CHECK(segment_set_deviation(segs, segs) == 0.0);
  const auto g = PiecewiseLinearConvexFn::abs_sum({{1.0, 0.25}});
  CHECK(segment_set_deviation(segs, subdiff_graph(g, -1.0, 1.0)) == doctest::Approx(0.25));
}
