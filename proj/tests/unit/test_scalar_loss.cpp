#include <doctest.h>

#include "subdiff/scalar_loss.hpp"

#include <cmath>
#include <random>

using namespace subdiff;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(a + (b - a) * i / n);
  return g;
}

}  // namespace

TEST_CASE("builtin losses decompose") {
  for (const char* name : {"abs", "hinge", "pinball", "square"}) {
    const auto h = ScalarConvexLoss::builtin(name, 0.3);
    const auto rep = decompose_check(h, grid(-3.0, 3.0, 601));
    CHECK_MESSAGE(rep.ok, name);
    CHECK(rep.max_residual < 1e-12);
  }
}

TEST_CASE("abs loss") {
  const auto h = ScalarConvexLoss::abs_loss();
  REQUIRE(h.kinks().size() == 1);
  CHECK(h.kinks()[0].t == 0.0);
  CHECK(h.kinks()[0].a == 2.0);
  CHECK(h.zeta() == 3.0);
  CHECK(h.eval(-2.5) == 2.5);
  CHECK(h.selection_g(0.0) == 1.0);
  CHECK(h.selection_g(-1e-300) == -1.0);
  const Interval1D s = h.subdiff_interval(0.0);
  CHECK(s.lo == -1.0);
  CHECK(s.hi == 1.0);
  CHECK(h.subdiff_interval(0.5).lo == 1.0);
}

TEST_CASE("hinge, pinball and square") {
  const auto hinge = ScalarConvexLoss::hinge();
  CHECK(hinge.zeta() == doctest::Approx(2.0));
  CHECK(hinge.eval(-1.0) == doctest::Approx(0.0));
  const auto pin = ScalarConvexLoss::pinball(0.25);
  CHECK(pin.zeta() == doctest::Approx(2.0));
  CHECK(pin.eval(2.0) == doctest::Approx(0.5));
  CHECK(pin.eval(-2.0) == doctest::Approx(1.5));
  CHECK(pin.subdiff_interval(0.0).lo == doctest::Approx(-0.75));
  CHECK(pin.subdiff_interval(0.0).hi == doctest::Approx(0.25));
  const auto sq = ScalarConvexLoss::square();
  CHECK(sq.kinks().empty());
  CHECK(sq.zeta() == 1.0);
  CHECK(sq.selection_g(1.5) == doctest::Approx(3.0));
  CHECK_FALSE(sq.lipschitz());
  CHECK_THROWS_AS(ScalarConvexLoss::builtin("nope"), Error);
}

TEST_CASE("selection lies in the subdifferential and is right-continuous") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), s(-3.0, 3.0);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> bp(1 + it % 4);
    for (auto& b : bp) b = u(rng);
    std::sort(bp.begin(), bp.end());
    std::vector<double> sl(bp.size() + 1);
    for (auto& v : sl) v = s(rng);
    std::sort(sl.begin(), sl.end());
    const auto h = ScalarConvexLoss::from_slopes(bp, sl, 0.25);
    CHECK(decompose_check(h, grid(-3.0, 3.0, 301)).ok);
    CHECK(h.eval(0.0) == doctest::Approx(0.25));
    for (double z : grid(-3.0, 3.0, 97)) {
      CHECK(h.subdiff_interval(z).contains(h.selection_g(z), 1e-12));
      // right derivative
      CHECK(h.selection_g(z) == doctest::Approx((h.eval(z + 1e-7) - h.eval(z)) / 1e-7).epsilon(1e-5));
    }
    for (double t : bp) {
      CHECK(h.selection_g(t) == doctest::Approx(h.subdiff_interval(t).hi));
      CHECK(h.kink_index(t, 1e-12) >= 0);
    }
    double z = 1.0;
    for (const auto& k : h.kinks()) z += k.a;
    CHECK(h.zeta() == doctest::Approx(z));
  }
}

TEST_CASE("from_slopes validation") {
  CHECK_THROWS_AS(ScalarConvexLoss::from_slopes({0.0}, {1.0, -1.0}), Error);
  CHECK_THROWS_AS(ScalarConvexLoss::from_slopes({1.0, 0.0}, {-1.0, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(ScalarConvexLoss::from_slopes({0.0}, {1.0}), Error);
}

TEST_CASE("decompose_check flags a wrong reference") {
  const auto bad = ScalarConvexLoss::quadratic("bad", {{0.0, 2.0}}, 0.0, -1.0, 0.0,
                                               [](double z) { return std::abs(z) + 0.1; });
  const auto rep = decompose_check(bad, grid(-1.0, 1.0, 21));
  CHECK_FALSE(rep.ok);
  CHECK(rep.max_residual == doctest::Approx(0.1));
}

TEST_CASE("scaled loss") {
  const auto h = ScalarConvexLoss::abs_loss().scaled(0.5);
  CHECK(h.eval(-2.0) == doctest::Approx(1.0));
  CHECK(h.zeta() == doctest::Approx(2.0));
}
