#include "helpers.hpp"

#include <doctest.h>

#include "subdiff/landscape.hpp"

#include <cmath>
#include <numbers>

using namespace subdiff;

TEST_CASE("ring constant") {
  const double c = solve_c_constant();
  CHECK(c > 0.4);
  CHECK(c < 0.5);
  CHECK(std::abs(c / (1 + c * c) + std::atan(c) - std::numbers::pi / 4) < 1e-12);
  CHECK(std::abs(c_equation(c)) < 1e-12);
  CHECK(c_equation(0.0) < 0.0);
  CHECK(c_equation(1.0) > 0.0);
}

TEST_CASE("distance to the population stationary set") {
  const Vector xb = 2.0 * Vector::Unit(3, 0);
  const auto Z = population_stationary_set(xb);
  CHECK(Z.rho == doctest::Approx(2.0 * Z.c));
  CHECK(dist_to_population_Z(Vector::Zero(3), xb) == 0.0);
  CHECK(dist_to_population_Z(xb, xb) == 0.0);
  CHECK(dist_to_population_Z(-xb, xb) == 0.0);
  CHECK(dist_to_population_Z(Z.rho * Vector::Unit(3, 2), xb) < 1e-15);
  // between zero and the ring, along the orthogonal direction
  CHECK(dist_to_population_Z(0.25 * Z.rho * Vector::Unit(3, 1), xb) == doctest::Approx(0.25 * Z.rho));
  const Vector p = Vector::Unit(3, 0) * 0.3 + Vector::Unit(3, 1) * Z.rho;
  CHECK(dist_to_population_Z(p, xb) == doctest::Approx(0.3));
}

TEST_CASE("stationary points on a noiseless sample") {
  const int d = 4;
  Rng rng(71);
  Vector xb = th::gauss(rng, d);
  xb.normalize();
  const auto model = CompositeModel::phase_retrieval(d);
  const EmpiricalObjective obj(model, ScalarConvexLoss::abs_loss(),
                               draw_dataset(model, DistributionSpec::gaussian(1.0), xb, 400, 3));
  CHECK(stationarity_residual(obj, xb) == 0.0);
  CHECK(stationarity_residual(obj, Vector::Zero(d)) == 0.0);
  CHECK(stationarity_residual(obj, 0.5 * xb) > 0.1);

  std::vector<Vector> starts;
  for (int i = 0; i < 6; ++i) starts.push_back(th::gauss(rng, d));
  StationaryConfig cfg;
  cfg.x_bar = xb;
  cfg.iterations = 3000;
  cfg.stagnation_iterations = 1500;
  const auto reps = find_stationary_points(obj, starts, cfg);
  REQUIRE(reps.size() == starts.size());
  const double tol = default_stationary_tol(obj, xb);
  int ok = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    CHECK(r.start_index == static_cast<int>(i));
    CHECK(r.residual == doctest::Approx(stationarity_residual(obj, r.x)));
    CHECK(r.success == (r.residual <= tol));
    CHECK(r.dist_to_Z == doctest::Approx(dist_to_population_Z(r.x, xb)));
    if (r.success) {
      ++ok;
      CHECK(r.dist_to_Z < 0.2);
    }
  }
  CHECK(ok >= 1);
  const double D = deviation_ZS_to_Z(reps, xb, 0.01);
  CHECK(D >= 0.0);
  CHECK(cluster_terminals(reps, 0.01).size() <= static_cast<std::size_t>(ok));

  // same answer with more threads
  cfg.threads = 4;
  const auto again = find_stationary_points(obj, starts, cfg);
  for (std::size_t i = 0; i < reps.size(); ++i) CHECK(again[i].x == reps[i].x);
}

TEST_CASE("landscape solver rejects other models") {
  const auto model = CompositeModel::blind_deconv(2, 2);
  const EmpiricalObjective obj(model, ScalarConvexLoss::abs_loss(),
                               draw_dataset(model, DistributionSpec::gaussian(1.0), Vector::Ones(4), 10, 3));
  StationaryConfig cfg;
  cfg.x_bar = Vector::Ones(4);
  CHECK_THROWS_AS(find_stationary_points(obj, {Vector::Zero(4)}, cfg), Error);
}
