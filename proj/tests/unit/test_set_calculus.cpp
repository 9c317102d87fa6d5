#include "../support/oracles.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace subdiff;

TEST_CASE("support of simple bodies") {
  const ConvexBody seg = ConvexBody::interval(-1.0, 2.0);
  CHECK(support(seg, Direction(Vector::Constant(1, 1.0))) == doctest::Approx(2.0));
  CHECK(support(seg, Direction(Vector::Constant(1, -1.0))) == doctest::Approx(1.0));

  const ConvexBody sq = ConvexBody::zonotope(Vector::Zero(2), {Vector::Unit(2, 0), Vector::Unit(2, 1)});
  const Vector u = Vector::Ones(2) / std::sqrt(2.0);
  CHECK(support(sq, Direction(u)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(support_unnormalized(sq, Vector::Ones(2) * 3.0) == doctest::Approx(6.0));
}

TEST_CASE("direction rejects non-unit vectors") {
  CHECK_THROWS_AS(Direction(Vector::Ones(2)), Error);
  CHECK_NOTHROW(Direction::normalized(Vector::Ones(2)));
}

TEST_CASE("projection distance agrees with brute force") {
  Rng rng(11);
  for (int it = 0; it < 150; ++it) {
    const int d = 1 + it % 3;
    const ConvexBody B = th::rand_body(rng, d, 6);
    const Vector y = th::gauss(rng, d, 1.5);
    const double want = oracle::dist_to_body(y, B);
    const Projection p = project(y, B, 1e-12);
    CHECK(std::abs(p.distance - want) < 1e-7);
    CHECK(p.lower_bound <= want + 1e-9);
    CHECK(std::abs(dist_point_to_body(y, B) - want) < 1e-7);
  }
}

TEST_CASE("hausdorff and deviation match vertex enumeration") {
  Rng rng(12);
  double worst = 0.0;
  for (int it = 0; it < 120; ++it) {
    const int d = 1 + it % 3;
    const ConvexBody A = th::rand_body(rng, d, 8), B = th::rand_body(rng, d, 8);
    const SetDistance dv = subdiff::deviation(A, B);
    const SetDistance h = subdiff::hausdorff(A, B);
    CHECK(dv.exact);
    worst = std::max(worst, std::abs(dv.value - oracle::deviation(A, B)));
    worst = std::max(worst, std::abs(h.value - oracle::hausdorff(A, B)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("hausdorff is symmetric and satisfies the triangle inequality") {
  Rng rng(13);
  for (int it = 0; it < 100; ++it) {
    const int d = 1 + it % 3;
    const ConvexBody A = th::rand_body(rng, d, 5), B = th::rand_body(rng, d, 5), C = th::rand_body(rng, d, 5);
    const double ab = subdiff::hausdorff(A, B).value, ba = subdiff::hausdorff(B, A).value;
    CHECK(std::abs(ab - ba) < 1e-9);
    const double ac = subdiff::hausdorff(A, C).value, cb = subdiff::hausdorff(C, B).value;
    CHECK(ab <= ac + cb + 1e-9);
    CHECK(subdiff::hausdorff(A, A).value < 1e-9);
  }
}

TEST_CASE("support route equals vertex route in the plane") {
  Rng rng(14);
  for (int it = 0; it < 60; ++it) {
    const ConvexBody A = th::rand_body(rng, 2, 6), B = th::rand_body(rng, 2, 6);
    const SetDistance hs = hausdorff_support(A, B);
    CHECK(hs.exact);
    CHECK(std::abs(hs.value - oracle::hausdorff(A, B)) < 1e-6);
  }
}

TEST_CASE("sampled support route is a lower bound in 3d") {
  Rng rng(15);
  for (int it = 0; it < 30; ++it) {
    const ConvexBody A = th::rand_body(rng, 3, 6), B = th::rand_body(rng, 3, 6);
    const SetDistance hs = hausdorff_support(A, B);
    CHECK(hs.value <= oracle::hausdorff(A, B) + 1e-9);
  }
}

TEST_CASE("convex hull in the plane matches gift wrapping") {
  Rng rng(16);
  for (int it = 0; it < 40; ++it) {
    std::vector<Vector> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(th::gauss(rng, 2));
    const ConvexBody H = convex_hull(pts);
    const auto ref = oracle::gift_wrap(pts);
    const auto* vp = H.as_vpolytope();
    REQUIRE(vp != nullptr);
    CHECK(vp->points.size() == ref.size());
    const ConvexBody R = ConvexBody::vpolytope(ref);
    CHECK(oracle::hausdorff(H, R) < 1e-12);
  }
}

TEST_CASE("minkowski sum support is additive") {
  Rng rng(17);
  for (int it = 0; it < 60; ++it) {
    const int d = 1 + it % 3;
    const ConvexBody A = th::rand_zonotope(rng, d, 3), B = th::rand_zonotope(rng, d, 4);
    const ConvexBody P = th::rand_vpoly(rng, d, 3), Q = th::rand_vpoly(rng, d, 4);
    const ConvexBody S = minkowski_sum(A, B), T = minkowski_sum(P, Q);
    for (int k = 0; k < 5; ++k) {
      const Direction u = Direction::normalized(th::gauss(rng, d));
      CHECK(support(S, u) == doctest::Approx(support(A, u) + support(B, u)).epsilon(1e-9));
      CHECK(support(T, u) == doctest::Approx(support(P, u) + support(Q, u)).epsilon(1e-9));
    }
  }
}

TEST_CASE("hull and minkowski contraction") {
  Rng rng(18);
  for (int it = 0; it < 200; ++it) {
    const int d = 1 + it % 3;
    const int n = 2 + it % 4;
    std::vector<Vector> P, Q;
    for (int i = 0; i < n; ++i) {
      P.push_back(th::gauss(rng, d));
      Q.push_back(th::gauss(rng, d));
    }
    double cloud = 0.0;
    for (int i = 0; i < n; ++i) {
      double a = 1e300, b = 1e300;
      for (int j = 0; j < n; ++j) {
        a = std::min(a, (P[i] - Q[j]).norm());
        b = std::min(b, (Q[i] - P[j]).norm());
      }
      cloud = std::max({cloud, a, b});
    }
    CHECK(subdiff::hausdorff(convex_hull(P), convex_hull(Q)).value <= cloud + 1e-9);

    const ConvexBody A1 = th::rand_zonotope(rng, d, 3), A2 = th::rand_zonotope(rng, d, 3);
    const ConvexBody B1 = th::rand_zonotope(rng, d, 3), B2 = th::rand_zonotope(rng, d, 3);
    const double lhs = subdiff::hausdorff(minkowski_sum(A1, A2), minkowski_sum(B1, B2)).value;
    CHECK(lhs <= subdiff::hausdorff(A1, B1).value + subdiff::hausdorff(A2, B2).value + 1e-9);
  }
}

TEST_CASE("minkowski sum of mixed representations is unsupported") {
  Rng rng(19);
  const ConvexBody Z = th::rand_zonotope(rng, 2, 2), V = th::rand_vpoly(rng, 2, 3);
  CHECK_THROWS_AS(minkowski_sum(Z, V), Error);
  const ConvexBody p = ConvexBody::point(Vector::Ones(2));
  CHECK(subdiff::hausdorff(minkowski_sum(p, V), minkowski_sum(V, p)).value < 1e-12);
}

TEST_CASE("scaled body") {
  const ConvexBody Z = ConvexBody::zonotope(Vector::Ones(2), {Vector::Unit(2, 0)});
  const ConvexBody S = scaled(Z, -2.0);
  const Direction e0(Vector::Unit(2, 0));
  CHECK(support(S, e0) == doctest::Approx(0.0));
  CHECK(support(S, Direction(-Vector::Unit(2, 0))) == doctest::Approx(4.0));
}

TEST_CASE("dimension mismatch is reported") {
  const ConvexBody A = ConvexBody::point(Vector::Zero(2));
  const ConvexBody B = ConvexBody::point(Vector::Zero(3));
  CHECK_THROWS_AS(subdiff::hausdorff(A, B), Error);
  try {
    subdiff::hausdorff(A, B);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
}
