#include "subdiff/composite_models.hpp"
#include "subdiff/parallel.hpp"

#include <cmath>

namespace subdiff {

namespace {

const std::string kNames[] = {"pr", "ms", "bd", "generic"};

}  // namespace

std::string model_kind_name(ModelKind k) { return kNames[static_cast<int>(k)]; }

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "pr" || name == "phase_retrieval") return ModelKind::phase_retrieval;
  if (name == "ms" || name == "matrix_sensing") return ModelKind::matrix_sensing;
  if (name == "bd" || name == "blind_deconv") return ModelKind::blind_deconv;
  if (name == "generic" || name == "linear") return ModelKind::generic;
  fail(ErrorCode::invalid_argument, "unknown model '" + name + "'");
}

CompositeModel::CompositeModel(ModelKind k, std::vector<int> shape) : kind_(k), shape_(std::move(shape)) {
  for (int s : shape_) require(s >= 1, ErrorCode::invalid_argument, "model: dimensions must be >= 1");
  switch (kind_) {
    case ModelKind::phase_retrieval:
    case ModelKind::generic:
      require(shape_.size() == 1, ErrorCode::invalid_argument, "model: expected one dimension");
      dim_ = feat_ = shape_[0];
      break;
    case ModelKind::matrix_sensing:
      require(shape_.size() == 2, ErrorCode::invalid_argument, "matrix sensing: expected (D, r0)");
      dim_ = shape_[0] * shape_[1];
      feat_ = shape_[0] * shape_[0];
      break;
    case ModelKind::blind_deconv:
      require(shape_.size() == 2, ErrorCode::invalid_argument, "blind deconvolution: expected (d1, d2)");
      dim_ = feat_ = shape_[0] + shape_[1];
      break;
  }
}

CompositeModel CompositeModel::phase_retrieval(int d) { return CompositeModel(ModelKind::phase_retrieval, {d}); }
CompositeModel CompositeModel::matrix_sensing(int D, int r0) {
  return CompositeModel(ModelKind::matrix_sensing, {D, r0});
}
CompositeModel CompositeModel::blind_deconv(int d1, int d2) { return CompositeModel(ModelKind::blind_deconv, {d1, d2}); }
CompositeModel CompositeModel::generic_linear(int d) { return CompositeModel(ModelKind::generic, {d}); }

CompositeModel CompositeModel::from_name(const std::string& name, const std::vector<int>& dims) {
  return CompositeModel(model_kind_from_name(name), dims);
}

const std::string& CompositeModel::name() const { return kNames[static_cast<int>(kind_)]; }

double CompositeModel::c_value(const Vector& x, const double* feat, double b) const {
  require_dim(x.size(), dim_, "c_value");
  switch (kind_) {
    case ModelKind::phase_retrieval: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += feat[i] * x[i];
      return s * s - b;
    }
    case ModelKind::generic: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += feat[i] * x[i];
      return s - b;
    }
    case ModelKind::matrix_sensing: {
      const int D = shape_[0], r = shape_[1];
      double s = 0.0;
      for (int k = 0; k < r; ++k) {
        const double* xk = x.data() + k * D;
        for (int j = 0; j < D; ++j) {
          double col = 0.0;
          for (int i = 0; i < D; ++i) col += feat[i + j * D] * xk[i];
          s += col * xk[j];
        }
      }
      return s - b;
    }
    case ModelKind::blind_deconv: {
      const int d1 = shape_[0], d2 = shape_[1];
      double uy = 0.0, vw = 0.0;
      for (int i = 0; i < d1; ++i) uy += feat[i] * x[i];
      for (int i = 0; i < d2; ++i) vw += feat[d1 + i] * x[d1 + i];
      return uy * vw - b;
    }
  }
  fail(ErrorCode::internal, "c_value: bad model kind");
}

void CompositeModel::c_grad(const Vector& x, const double* feat, Vector& out) const {
  require_dim(x.size(), dim_, "c_grad");
  out.resize(dim_);
  switch (kind_) {
    case ModelKind::phase_retrieval: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += feat[i] * x[i];
      for (int i = 0; i < dim_; ++i) out[i] = 2.0 * s * feat[i];
      return;
    }
    case ModelKind::generic:
      for (int i = 0; i < dim_; ++i) out[i] = feat[i];
      return;
    case ModelKind::matrix_sensing: {
      const int D = shape_[0], r = shape_[1];
      for (int k = 0; k < r; ++k) {
        const double* xk = x.data() + k * D;
        for (int i = 0; i < D; ++i) {
          double s = 0.0;
          for (int j = 0; j < D; ++j) s += (feat[i + j * D] + feat[j + i * D]) * xk[j];
          out[i + k * D] = s;
        }
      }
      return;
    }
    case ModelKind::blind_deconv: {
      const int d1 = shape_[0], d2 = shape_[1];
      double uy = 0.0, vw = 0.0;
      for (int i = 0; i < d1; ++i) uy += feat[i] * x[i];
      for (int i = 0; i < d2; ++i) vw += feat[d1 + i] * x[d1 + i];
      for (int i = 0; i < d1; ++i) out[i] = vw * feat[i];
      for (int i = 0; i < d2; ++i) out[d1 + i] = uy * feat[d1 + i];
      return;
    }
  }
}

void CompositeModel::flatten(const SampleXi& xi, double* feat, double& b) const {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PhaseRetrievalXi>) {
          require(kind_ == ModelKind::phase_retrieval, ErrorCode::invalid_argument, "sample/model mismatch");
          require_dim(s.a.size(), feat_, "phase retrieval sample");
          for (int i = 0; i < feat_; ++i) feat[i] = s.a[i];
        } else if constexpr (std::is_same_v<T, GenericXi>) {
          require(kind_ == ModelKind::generic, ErrorCode::invalid_argument, "sample/model mismatch");
          require_dim(s.phi.size(), feat_, "generic sample");
          for (int i = 0; i < feat_; ++i) feat[i] = s.phi[i];
        } else if constexpr (std::is_same_v<T, MatrixSensingXi>) {
          require(kind_ == ModelKind::matrix_sensing, ErrorCode::invalid_argument, "sample/model mismatch");
          require_dim(s.A.rows(), shape_[0], "matrix sensing sample rows");
          require_dim(s.A.cols(), shape_[0], "matrix sensing sample cols");
          for (int i = 0; i < feat_; ++i) feat[i] = s.A.data()[i];
        } else {
          require(kind_ == ModelKind::blind_deconv, ErrorCode::invalid_argument, "sample/model mismatch");
          require_dim(s.u.size(), shape_[0], "blind deconvolution sample u");
          require_dim(s.v.size(), shape_[1], "blind deconvolution sample v");
          for (int i = 0; i < shape_[0]; ++i) feat[i] = s.u[i];
          for (int i = 0; i < shape_[1]; ++i) feat[shape_[0] + i] = s.v[i];
        }
        b = s.b;
      },
      xi);
}

SampleXi CompositeModel::unflatten(const double* feat, double b) const {
  switch (kind_) {
    case ModelKind::phase_retrieval:
      return PhaseRetrievalXi{Eigen::Map<const Vector>(feat, feat_), b};
    case ModelKind::generic:
      return GenericXi{Eigen::Map<const Vector>(feat, feat_), b};
    case ModelKind::matrix_sensing:
      return MatrixSensingXi{Eigen::Map<const Matrix>(feat, shape_[0], shape_[0]), b};
    case ModelKind::blind_deconv:
      return BlindDeconvXi{Eigen::Map<const Vector>(feat, shape_[0]), Eigen::Map<const Vector>(feat + shape_[0], shape_[1]),
                           b};
  }
  fail(ErrorCode::internal, "unflatten: bad model kind");
}

double CompositeModel::c_value(const Vector& x, const SampleXi& xi) const {
  std::vector<double> f(static_cast<std::size_t>(feat_));
  double b = 0.0;
  flatten(xi, f.data(), b);
  return c_value(x, f.data(), b);
}

Vector CompositeModel::c_grad(const Vector& x, const SampleXi& xi) const {
  std::vector<double> f(static_cast<std::size_t>(feat_));
  double b = 0.0;
  flatten(xi, f.data(), b);
  Vector out;
  c_grad(x, f.data(), out);
  return out;
}

void DistributionSpec::validate() const {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::invalid_argument, "distribution: sigma must be > 0");
  if (noise.kind == NoiseSpec::Kind::student_t)
    require(noise.df > 0.0 && noise.scale >= 0.0, ErrorCode::invalid_argument, "noise: bad student-t parameters");
}

SampleXi Dataset::sample(const CompositeModel& model, Eigen::Index i) const {
  require(i >= 0 && i < size(), ErrorCode::invalid_argument, "dataset: sample index out of range");
  return model.unflatten(feat(i), b[i]);
}

Dataset Dataset::from_samples(const CompositeModel& model, const std::vector<SampleXi>& xs) {
  require(!xs.empty(), ErrorCode::invalid_argument, "dataset: no samples");
  Dataset ds;
  ds.kind = model.kind();
  ds.shape = model.shape();
  ds.features.resize(model.feature_dim(), static_cast<Eigen::Index>(xs.size()));
  ds.b.resize(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    model.flatten(xs[i], ds.features.col(j).data(), ds.b[j]);
  }
  return ds;
}

Dataset draw_dataset(const CompositeModel& model, const DistributionSpec& dist, const Vector& x_bar, Eigen::Index m,
                     std::uint64_t seed, int threads) {
  require(m >= 1, ErrorCode::invalid_argument, "draw_dataset: m must be >= 1");
  require_dim(x_bar.size(), model.dim(), "draw_dataset ground truth");
  dist.validate();
  Dataset ds;
  ds.kind = model.kind();
  ds.shape = model.shape();
  ds.seed = seed;
  const int F = model.feature_dim();
  ds.features.resize(F, m);
  ds.b.resize(m);
  const Eigen::Index blocks = (m + kDatasetBlock - 1) / kDatasetBlock;
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t blk) {
    Rng rng(derive_seed(seed, 0xda7a, blk));
    std::normal_distribution<double> nd(0.0, dist.sigma);
    std::bernoulli_distribution coin(0.5);
    std::student_t_distribution<double> td(dist.noise.df);
    const Eigen::Index lo = static_cast<Eigen::Index>(blk) * kDatasetBlock;
    const Eigen::Index hi = std::min(m, lo + kDatasetBlock);
    for (Eigen::Index i = lo; i < hi; ++i) {
      double* f = ds.features.col(i).data();
      if (dist.law == FeatureLaw::gaussian) {
        for (int j = 0; j < F; ++j) f[j] = nd(rng);
      } else {
        const double s = dist.sigma / 4.0;
        for (int j = 0; j < F; ++j) f[j] = coin(rng) ? s : -s;
      }
      const double clean = model.c_raw(x_bar, f);
      double b = clean;
      if (dist.response) b = dist.response(rng, clean);
      else if (dist.noise.kind == NoiseSpec::Kind::student_t) b += dist.noise.scale * td(rng);
      ds.b[i] = b;
    }
  });
  return ds;
}

}  // namespace subdiff
