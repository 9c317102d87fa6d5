#ifndef SUBDIFF_SCALAR_LOSS_HPP
#define SUBDIFF_SCALAR_LOSS_HPP

// One-dimensional convex losses h = h_sm + sum_j a_j (z - t_j)_+ with a
// finite kink list.

#include "subdiff/set_calculus.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subdiff {

struct KinkSpec {
  double t = 0.0;  // location
  double a = 0.0;  // jump h'_+(t) - h'_-(t), > 0
};

class ScalarConvexLoss {
 public:
  using Fn = std::function<double(double)>;

  // Smooth part given by callables. `reference` is an independent formula
  // for h used by decompose_check; may be empty.
  ScalarConvexLoss(std::string name, std::vector<KinkSpec> kinks, Fn h_sm, Fn g_sm, Fn reference = {},
                   bool lipschitz = true);
  // Smooth part q0 + q1 z + q2 z^2.
  static ScalarConvexLoss quadratic(std::string name, std::vector<KinkSpec> kinks, double q0, double q1, double q2,
                                    Fn reference = {}, bool lipschitz = true);

  static ScalarConvexLoss abs_loss();
  static ScalarConvexLoss hinge();
  static ScalarConvexLoss pinball(double alpha);
  static ScalarConvexLoss square();
  // Built-in by name: "abs", "hinge", "pinball", "square".
  static ScalarConvexLoss builtin(const std::string& name, double pinball_alpha = 0.5);

  // Piecewise-linear convex loss with slope slopes[i] on the i-th piece cut
  // by `breakpoints` (slopes.size() == breakpoints.size() + 1) and h(0) = value0.
  static ScalarConvexLoss from_slopes(std::vector<double> breakpoints, std::vector<double> slopes,
                                      double value0 = 0.0);

  const std::string& name() const { return name_; }
  const std::vector<KinkSpec>& kinks() const { return kinks_; }
  bool lipschitz() const { return lipschitz_; }
  const std::optional<std::array<double, 3>>& quadratic_coeffs() const { return quad_; }
  bool has_reference() const { return static_cast<bool>(reference_); }

  double h_sm(double z) const;
  double g_sm(double z) const;
  double h_ns(double z) const;
  double eval(double z) const;
  double reference(double z) const;

  Interval1D subdiff_interval(double z) const;
  // g(z) = g_sm(z) + sum_j a_j 1(z >= t_j)
  double selection_g(double z) const;
  double zeta() const;

  // Index of the kink with |z - t_j| < tol, or -1.
  int kink_index(double z, double tol) const;

  ScalarConvexLoss scaled(double alpha) const;

 private:
  std::string name_;
  std::vector<KinkSpec> kinks_;
  Fn h_sm_, g_sm_, reference_;
  bool lipschitz_ = true;
  std::optional<std::array<double, 3>> quad_;
};

struct DecomposeReport {
  double max_residual = 0.0;       // |h_sm + h_ns - reference| over the grid
  double max_gsm_jump = 0.0;       // |g_sm(t+) - g_sm(t-)| over kinks
  double max_monotone_violation = 0.0;
  double max_convexity_violation = 0.0;
  std::vector<double> violations;  // grid points or kinks that failed
  bool ok = true;
};

DecomposeReport decompose_check(const ScalarConvexLoss& h, const std::vector<double>& grid);

}  // namespace subdiff

#endif
