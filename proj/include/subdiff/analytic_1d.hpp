#ifndef SUBDIFF_ANALYTIC_1D_HPP
#define SUBDIFF_ANALYTIC_1D_HPP

// Exact one-dimensional piecewise-linear convex functions, their
// subdifferentials, and the pointwise (d1) and graphical (d2) distances
// between subdifferential maps on a window (a, b).

#include "subdiff/scalar_loss.hpp"

#include <functional>
#include <vector>

namespace subdiff {

class PiecewiseLinearConvexFn {
 public:
  // slopes[i] applies between breakpoints[i-1] and breakpoints[i];
  // value0 = f(0).
  PiecewiseLinearConvexFn(std::vector<double> breakpoints, std::vector<double> slopes, double value0 = 0.0);

  // sum_k w_k |x - c_k|, w_k > 0
  static PiecewiseLinearConvexFn abs_sum(const std::vector<std::pair<double, double>>& weight_center);

  const std::vector<double>& breakpoints() const { return bps_; }
  const std::vector<double>& slopes() const { return slopes_; }

  double value(double x) const;
  Interval1D exact_subdiff(double x) const;
  double right_derivative(double x) const;
  ScalarConvexLoss to_loss() const;

 private:
  std::vector<double> bps_, slopes_;
  double value0_ = 0.0;
};

// A pointwise selection x -> g(x) in the subdifferential of f.
using SelectionRule = std::function<double(const PiecewiseLinearConvexFn&, double)>;

double right_derivative_rule(const PiecewiseLinearConvexFn& f, double x);

// Breakpoints of f1 and f2 inside (a, b) plus the midpoint of every piece.
std::vector<double> d1_candidates(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a,
                                  double b);

double interval_hausdorff(const Interval1D& p, const Interval1D& q);

// sup over x in (a, b) of H(df1(x), df2(x)).
double d1_metric(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a, double b);
// Hausdorff distance between the graphs of df1 and df2 over (a, b).
double d2_graph_metric(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a, double b);
// sup over x in (a, b) of |g1(x) - g2(x)|; rules are checked for validity.
double selection_sup_diff(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a, double b,
                          const SelectionRule& g1 = right_derivative_rule,
                          const SelectionRule& g2 = right_derivative_rule);

// Same quantities restricted to a finite (closed) point set.
double d1_on_points(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2,
                    const std::vector<double>& points);
double selection_diff_on_points(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2,
                                const std::vector<double>& points, const SelectionRule& g1, const SelectionRule& g2);

// Axis-aligned segment of a subdifferential graph.
struct GraphSegment {
  double x0, y0, x1, y1;
};
std::vector<GraphSegment> subdiff_graph(const PiecewiseLinearConvexFn& f, double a, double b);
// sup over p in A of dist(p, B) for finite segment unions.
double segment_set_deviation(const std::vector<GraphSegment>& A, const std::vector<GraphSegment>& B);

// Random convex pair material: up to max_breaks breakpoints in (a, b).
PiecewiseLinearConvexFn random_pl_convex(Rng& rng, double a, double b, int max_breaks);
// A selection rule choosing a seeded random point of the subdifferential at
// each breakpoint.
SelectionRule random_selection_rule(std::uint64_t seed);

// f_{1,n}(x) = |x| and f_{2,n}(x) = (|x - 1/n| + |x + 1/n|) / 2.
PiecewiseLinearConvexFn remark_b_f1(int n);
PiecewiseLinearConvexFn remark_b_f2(int n);

}  // namespace subdiff

#endif
