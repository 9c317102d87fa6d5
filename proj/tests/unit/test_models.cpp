#include "../support/oracles.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include "subdiff/composite_models.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace subdiff;

namespace {

std::vector<CompositeModel> all_models() {
  return {CompositeModel::phase_retrieval(4), CompositeModel::matrix_sensing(3, 2), CompositeModel::blind_deconv(3, 2),
          CompositeModel::generic_linear(5)};
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("subdiff_test_" + name)).string();
}

}  // namespace

TEST_CASE("model shapes") {
  const auto ms = CompositeModel::matrix_sensing(4, 2);
  CHECK(ms.dim() == 8);
  CHECK(ms.feature_dim() == 16);
  const auto bd = CompositeModel::blind_deconv(5, 5);
  CHECK(bd.dim() == 10);
  CHECK(bd.feature_dim() == 10);
  CHECK(CompositeModel::from_name("pr", {10}).dim() == 10);
  CHECK(CompositeModel::from_name("generic", {3}).degree() == 1);
  CHECK_THROWS_AS(CompositeModel::from_name("pr", {0}), Error);
  CHECK_THROWS_AS(CompositeModel::from_name("ms", {4}), Error);
  CHECK_THROWS_AS(CompositeModel::from_name("xx", {4}), Error);
}

TEST_CASE("value and gradient agree with written-out formulas and finite differences") {
  Rng rng(21);
  for (const auto& model : all_models()) {
    for (int it = 0; it < 30; ++it) {
      const Vector feat = th::gauss(rng, model.feature_dim());
      const Vector x = th::gauss(rng, model.dim());
      const double b = th::gauss(rng, 1)[0];
      CHECK(model.c_value(x, feat.data(), b) == doctest::Approx(oracle::model_value(model, x, feat.data(), b)));
      Vector g(model.dim());
      model.c_grad(x, feat.data(), g);
      CHECK((g - oracle::model_gradient(model, x, feat.data())).norm() < 1e-12 * (1.0 + g.norm()));
      const Vector fd = oracle::central_difference(
          [&](const Vector& y) { return model.c_value(y, feat.data(), b); }, x, 1e-5);
      CHECK((g - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("structured samples round-trip through the flat layout") {
  Rng rng(22);
  for (const auto& model : all_models()) {
    const Vector feat = th::gauss(rng, model.feature_dim());
    const SampleXi xi = model.unflatten(feat.data(), 0.75);
    Vector back(model.feature_dim());
    double b = 0.0;
    model.flatten(xi, back.data(), b);
    CHECK(back == feat);
    CHECK(b == 0.75);
    const Vector x = th::gauss(rng, model.dim());
    CHECK(model.c_value(x, xi) == model.c_value(x, feat.data(), 0.75));
  }
}

TEST_CASE("noiseless responses vanish at x_bar") {
  for (const auto& model : all_models()) {
    Rng rng(23);
    const Vector xb = th::gauss(rng, model.dim());
    for (auto law : {FeatureLaw::gaussian, FeatureLaw::rademacher_cube}) {
      const Dataset ds = draw_dataset(model, {law, 1.0, {}, {}}, xb, 300, 99);
      CHECK(ds.size() == 300);
      for (Eigen::Index i = 0; i < ds.size(); ++i) CHECK(std::abs(model.c_value(xb, ds.feat(i), ds.b[i])) == 0.0);
    }
  }
}

TEST_CASE("rademacher cube features take two values") {
  const auto model = CompositeModel::phase_retrieval(3);
  const Dataset ds = draw_dataset(model, DistributionSpec::rademacher_cube(2.0), Vector::Ones(3), 50, 1);
  for (Eigen::Index i = 0; i < ds.features.size(); ++i) CHECK(std::abs(ds.features.data()[i]) == 0.5);
}

TEST_CASE("drawing is deterministic and independent of thread count") {
  const auto model = CompositeModel::blind_deconv(3, 4);
  const Vector xb = Vector::LinSpaced(7, -1.0, 1.0);
  DistributionSpec dist = DistributionSpec::gaussian(1.0);
  dist.noise.kind = NoiseSpec::Kind::student_t;
  dist.noise.df = 3.0;
  dist.noise.scale = 0.1;
  const Dataset a = draw_dataset(model, dist, xb, 5000, 7, 1);
  const Dataset b = draw_dataset(model, dist, xb, 5000, 7, 8);
  const Dataset c = draw_dataset(model, dist, xb, 5000, 8, 1);
  CHECK(a.features == b.features);
  CHECK(a.b == b.b);
  CHECK(a.features != c.features);
  // prefix property of the block layout
  const Dataset p = draw_dataset(model, dist, xb, 2048, 7, 3);
  CHECK(p.features == a.features.leftCols(2048));
}

TEST_CASE("gaussian features have the requested scale") {
  const auto model = CompositeModel::phase_retrieval(2);
  const Dataset ds = draw_dataset(model, DistributionSpec::gaussian(2.0), Vector::Ones(2), 40000, 5, 2);
  const double var = ds.features.array().square().mean();
  CHECK(var == doctest::Approx(4.0).epsilon(0.05));
  CHECK(std::abs(ds.features.mean()) < 0.05);
}

TEST_CASE("invalid distributions are rejected") {
  const auto model = CompositeModel::phase_retrieval(2);
  CHECK_THROWS_AS(draw_dataset(model, DistributionSpec::gaussian(-1.0), Vector::Ones(2), 10, 1), Error);
  CHECK_THROWS_AS(draw_dataset(model, DistributionSpec::gaussian(1.0), Vector::Ones(3), 10, 1), Error);
}

TEST_CASE("dataset csv and binary round-trip") {
  for (const auto& model : all_models()) {
    const Vector xb = Vector::Ones(model.dim());
    const Dataset ds = draw_dataset(model, DistributionSpec::gaussian(1.0), xb, 37, 3);
    const std::string csv = tmp_path(model.name() + ".csv"), bin = tmp_path(model.name() + ".bin");
    save_dataset_csv(ds, csv);
    save_dataset_binary(ds, bin);
    const Dataset c = load_dataset_csv(csv), b = load_dataset_binary(bin);
    CHECK(c.kind == ds.kind);
    CHECK(c.shape == ds.shape);
    CHECK(c.features == ds.features);
    CHECK(c.b == ds.b);
    CHECK(b.features == ds.features);
    CHECK(b.b == ds.b);
    std::remove(csv.c_str());
    std::remove(bin.c_str());
  }
  CHECK_THROWS_AS(load_dataset_csv(tmp_path("does_not_exist.csv")), Error);
}

TEST_CASE("from_samples keeps sample order") {
  const auto model = CompositeModel::phase_retrieval(2);
  std::vector<SampleXi> xs{PhaseRetrievalXi{Vector::Unit(2, 0), 1.0}, PhaseRetrievalXi{Vector::Unit(2, 1), 2.0}};
  const Dataset ds = Dataset::from_samples(model, xs);
  CHECK(ds.size() == 2);
  CHECK(ds.b[1] == 2.0);
  CHECK(ds.features(1, 1) == 1.0);
}
