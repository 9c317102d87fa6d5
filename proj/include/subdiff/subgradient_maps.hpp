#ifndef SUBDIFF_SUBGRADIENT_MAPS_HPP
#define SUBDIFF_SUBGRADIENT_MAPS_HPP

// Selected subgradients G_S, empirical subdifferential zonotopes, the
// population estimate G and gap measurements between them.

#include "subdiff/composite_models.hpp"
#include "subdiff/scalar_loss.hpp"
#include "subdiff/set_calculus.hpp"

#include <memory>
#include <optional>

namespace subdiff {

inline constexpr double kKinkTol = 1e-12;

// Blocked evaluation of (1/n) sum_i g(c(x; xi_i)) grad c(x; xi_i) for many x
// at once (columns of X). Block partial sums are reduced in a fixed order so
// results do not depend on the number of threads.
struct BatchMoments {
  Matrix mean;    // dim x B
  Matrix second;  // dim x B, per-coordinate mean of squares; empty unless requested
};

BatchMoments selection_moments(const CompositeModel& model, const ScalarConvexLoss& loss, const Dataset& data,
                               const Matrix& X, bool want_second, int threads = 1);

class EmpiricalObjective {
 public:
  EmpiricalObjective(CompositeModel model, ScalarConvexLoss loss, Dataset data);

  const CompositeModel& model() const { return model_; }
  const ScalarConvexLoss& loss() const { return loss_; }
  const Dataset& data() const { return data_; }
  Eigen::Index m() const { return data_.size(); }
  int dim() const { return model_.dim(); }

  double value(const Vector& x) const;
  // Plain per-sample loop.
  Vector G_S(const Vector& x) const;
  // Blocked kernel; equal to G_S up to summation order.
  Matrix G_S_batch(const Matrix& X, int threads = 1) const;
  // Zonotope: center (1/m) sum mid(dh(c_i)) grad c_i, one generator per
  // sample whose c_i lies within kink_tol of a kink.
  ConvexBody subdiff(const Vector& x, double kink_tol = kKinkTol) const;

 private:
  CompositeModel model_;
  ScalarConvexLoss loss_;
  Dataset data_;
};

struct PopEstimate {
  Vector value;
  double error_bound = 0.0;
};

class PopulationOracle {
 public:
  enum class Strategy { mega_sample, closed_form };
  enum class ClosedFormTag { pr_gaussian_abs_noiseless, ms_gaussian_abs_noiseless };

  // Independent dataset of size m_pop drawn from dist.
  static PopulationOracle mega_sample(const CompositeModel& model, const ScalarConvexLoss& loss,
                                      const DistributionSpec& dist, const Vector& x_bar, Eigen::Index m_pop,
                                      std::uint64_t seed, int threads = 1);
  // Uses an existing dataset as the sampling measure.
  static PopulationOracle from_dataset(const CompositeModel& model, const ScalarConvexLoss& loss, Dataset data);
  // Throws ErrorCode::unavailable when no closed form is registered for the
  // (model, loss, distribution, noise) combination.
  static PopulationOracle closed_form(const CompositeModel& model, const ScalarConvexLoss& loss,
                                      const DistributionSpec& dist, const Vector& x_bar);
  static bool closed_form_available(const CompositeModel& model, const ScalarConvexLoss& loss,
                                    const DistributionSpec& dist);

  Strategy strategy() const { return strategy_; }
  Eigen::Index m_pop() const;
  int dim() const { return model_->dim(); }

  PopEstimate G(const Vector& x) const;
  // Columns of X; error bounds into `err` when non-null.
  Matrix G_batch(const Matrix& X, std::vector<double>* err = nullptr, int threads = 1) const;
  // Population subdifferential surrogate: the mega-sample zonotope, or the
  // singleton {G(x)} for closed forms. Always an approximation (flagged).
  ConvexBody subdiff(const Vector& x) const;

 private:
  PopulationOracle() = default;
  Strategy strategy_ = Strategy::mega_sample;
  ClosedFormTag tag_{};
  std::shared_ptr<const CompositeModel> model_;
  std::shared_ptr<const ScalarConvexLoss> loss_;
  std::shared_ptr<const Dataset> data_;
  Vector x_bar_;
  double sigma_ = 1.0;
};

struct GapRecord {
  Vector x;
  double gap_selection = 0.0;   // |G_S(x) - G(x)|
  double gap_hausdorff = 0.0;   // H(df_S(x), population surrogate)
  bool hausdorff_exact = true;  // false when the set metric was direction-sampled
  bool hausdorff_flagged = true;  // population set is a surrogate, not certified
  double oracle_err = 0.0;
};

GapRecord pointwise_gap(const EmpiricalObjective& obj, const PopulationOracle& oracle, const Vector& x);

// Probe points x0 + r * uniform(ball); probe 0 is x0 itself. Probe i depends
// only on (seed, i), so a smaller budget gives a prefix of a larger one.
struct ProbeSet {
  Vector x0;
  double r = 0.0;
  std::uint64_t seed = 0;
  Matrix points;   // dim x N
  Matrix pop;      // population G at each probe
  std::vector<double> pop_err;
};

Matrix ball_probes(const Vector& x0, double r, int count, std::uint64_t seed);
ProbeSet make_probe_set(const PopulationOracle& oracle, const Vector& x0, double r, int budget, std::uint64_t seed,
                        int threads = 1);

struct SupGapOptions {
  int refine_starts = 10;  // top probes refined per prefix
  int refine_steps = 100;  // hill-climb evaluations per start
  int threads = 1;
};

struct SupGapResult {
  double value = 0.0;
  Vector argmax;
  double oracle_err = 0.0;
  std::size_t evaluations = 0;
};

// Lower bound on sup_{x in B(x0, r)} |G(x) - G_S(x)|.
SupGapResult sup_gap_over_ball(const EmpiricalObjective& obj, const PopulationOracle& oracle, const ProbeSet& probes,
                               const SupGapOptions& opts = {});
SupGapResult sup_gap_over_ball(const EmpiricalObjective& obj, const PopulationOracle& oracle, const Vector& x0,
                               double r, int budget, std::uint64_t seed, const SupGapOptions& opts = {});

}  // namespace subdiff

#endif
