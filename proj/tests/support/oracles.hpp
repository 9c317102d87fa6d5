#ifndef SUBDIFF_TEST_ORACLES_HPP
#define SUBDIFF_TEST_ORACLES_HPP

// Slow, independent reference implementations used only by the tests.

#include "subdiff/analytic_1d.hpp"
#include "subdiff/composite_models.hpp"
#include "subdiff/scalar_loss.hpp"
#include "subdiff/set_calculus.hpp"

#include <functional>
#include <vector>

namespace oracle {

using subdiff::ConvexBody;
using subdiff::Matrix;
using subdiff::Vector;

// Every point of the form c + sum +-g_i, or the stored points.
std::vector<Vector> candidate_vertices(const ConvexBody& body);

// Exact distance to conv(points) by enumerating simplices of <= d+1 points.
double dist_to_hull(const Vector& y, const std::vector<Vector>& points);
// Exact distance to a zonotope by enumerating active sets of the box
// constrained least-squares problem.
double dist_to_zonotope(const Vector& y, const Vector& center, const std::vector<Vector>& gens);
double dist_to_body(const Vector& y, const ConvexBody& body);

double deviation(const ConvexBody& a, const ConvexBody& b);
double hausdorff(const ConvexBody& a, const ConvexBody& b);

// Jarvis march; counter-clockwise, collinear points dropped.
std::vector<Vector> gift_wrap(const std::vector<Vector>& points);

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h);

// Gradient of c(x; xi) written out per model from the flat feature layout.
Vector model_gradient(const subdiff::CompositeModel& model, const Vector& x, const double* feat);
double model_value(const subdiff::CompositeModel& model, const Vector& x, const double* feat, double b);

// (1/m) sum g(c_i) grad c_i by a plain loop using the two functions above.
Vector naive_selection_mean(const subdiff::CompositeModel& model, const subdiff::ScalarConvexLoss& loss,
                            const subdiff::Dataset& data, const Vector& x);

// sup over a grid of the interval Hausdorff distance (lower bound on d1).
double sampled_d1(const subdiff::PiecewiseLinearConvexFn& f, const subdiff::PiecewiseLinearConvexFn& g, double a,
                  double b, int n);
// Hausdorff distance between dense point samples of the two graphs.
double sampled_d2(const subdiff::PiecewiseLinearConvexFn& f, const subdiff::PiecewiseLinearConvexFn& g, double a,
                  double b, int n);

// Smallest N with (50 K N / (d+1))^(d+1) < 2^N, by integer arithmetic on
// exact logs in long double.
int vc_scan(int d, int K);

}  // namespace oracle

#endif
