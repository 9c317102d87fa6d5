#ifndef SUBDIFF_COMPOSITE_MODELS_HPP
#define SUBDIFF_COMPOSITE_MODELS_HPP

// Model families c(x; xi) with gradients and samplers.
//   phase retrieval   c = <a,x>^2 - b
//   matrix sensing    c = <A, X X^T> - b, X in R^{D x r0} flattened column-major
//   blind deconv      c = <u,y><v,w> - b, x = (y, w)
//   generic           c = <phi,x> - b

#include "subdiff/common.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace subdiff {

enum class ModelKind { phase_retrieval, matrix_sensing, blind_deconv, generic };

struct PhaseRetrievalXi {
  Vector a;
  double b = 0.0;
};
struct MatrixSensingXi {
  Matrix A;
  double b = 0.0;
};
struct BlindDeconvXi {
  Vector u, v;
  double b = 0.0;
};
struct GenericXi {
  Vector phi;
  double b = 0.0;
};
using SampleXi = std::variant<PhaseRetrievalXi, MatrixSensingXi, BlindDeconvXi, GenericXi>;

class CompositeModel {
 public:
  static CompositeModel phase_retrieval(int d);
  static CompositeModel matrix_sensing(int D, int r0);
  static CompositeModel blind_deconv(int d1, int d2);
  static CompositeModel generic_linear(int d);
  // "pr", "ms", "bd", "generic" with dims {d} | {D, r0} | {d1, d2} | {d}.
  static CompositeModel from_name(const std::string& name, const std::vector<int>& dims);

  ModelKind kind() const { return kind_; }
  const std::string& name() const;
  int dim() const { return dim_; }
  // Length of the flat feature vector of one sample (b excluded).
  int feature_dim() const { return feat_; }
  int degree() const { return kind_ == ModelKind::generic ? 1 : 2; }
  // Shape parameters: {d} | {D, r0} | {d1, d2} | {d}.
  const std::vector<int>& shape() const { return shape_; }

  // Flat-feature interface; `feat` points to feature_dim() doubles.
  double c_value(const Vector& x, const double* feat, double b) const;
  void c_grad(const Vector& x, const double* feat, Vector& out) const;
  // c without the -b term.
  double c_raw(const Vector& x, const double* feat) const { return c_value(x, feat, 0.0); }

  double c_value(const Vector& x, const SampleXi& xi) const;
  Vector c_grad(const Vector& x, const SampleXi& xi) const;

  // Flatten/unflatten a sample in declared order.
  void flatten(const SampleXi& xi, double* feat, double& b) const;
  SampleXi unflatten(const double* feat, double b) const;

 private:
  CompositeModel(ModelKind k, std::vector<int> shape);
  ModelKind kind_;
  std::vector<int> shape_;
  int dim_ = 0;
  int feat_ = 0;
};

enum class FeatureLaw { gaussian, rademacher_cube };

struct NoiseSpec {
  enum class Kind { none, student_t };
  Kind kind = Kind::none;
  double df = 3.0;
  double scale = 0.0;
};

// Optional replacement for the response: b = sampler(rng, clean_value).
using ResponseSampler = std::function<double(Rng&, double)>;

struct DistributionSpec {
  FeatureLaw law = FeatureLaw::gaussian;
  double sigma = 1.0;  // gaussian: N(0, sigma^2); rademacher cube: +-sigma/4
  NoiseSpec noise;
  ResponseSampler response;

  static DistributionSpec gaussian(double sigma) { return {FeatureLaw::gaussian, sigma, {}, {}}; }
  static DistributionSpec rademacher_cube(double sigma) { return {FeatureLaw::rademacher_cube, sigma, {}, {}}; }
  void validate() const;
};

// Samples stored column-wise: features.col(i) is xi_i, b[i] its response.
struct Dataset {
  ModelKind kind = ModelKind::phase_retrieval;
  std::vector<int> shape;
  std::uint64_t seed = 0;
  Matrix features;
  Vector b;

  Eigen::Index size() const { return b.size(); }
  const double* feat(Eigen::Index i) const { return features.col(i).data(); }
  SampleXi sample(const CompositeModel& model, Eigen::Index i) const;
  static Dataset from_samples(const CompositeModel& model, const std::vector<SampleXi>& xs);
};

// Rows are generated in fixed blocks of this many samples, each block from its
// own derived stream, so output is independent of worker count.
inline constexpr Eigen::Index kDatasetBlock = 1024;

Dataset draw_dataset(const CompositeModel& model, const DistributionSpec& dist, const Vector& x_bar, Eigen::Index m,
                     std::uint64_t seed, int threads = 1);

// Dataset export/import.
void save_dataset_csv(const Dataset& ds, const std::string& path);
Dataset load_dataset_csv(const std::string& path);
void save_dataset_binary(const Dataset& ds, const std::string& path);
Dataset load_dataset_binary(const std::string& path);

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

}  // namespace subdiff

#endif
