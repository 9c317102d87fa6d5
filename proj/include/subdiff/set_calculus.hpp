#ifndef SUBDIFF_SET_CALCULUS_HPP
#define SUBDIFF_SET_CALCULUS_HPP

// Compact convex bodies in R^d and the metrics between them: support
// function, point-to-set distance, deviation, Hausdorff distance, Minkowski
// sum and convex hull. All bodies are immutable values.

#include "subdiff/common.hpp"

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace subdiff {

struct PointSet {
  Vector p;
};

struct Interval1D {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double halfwidth() const { return 0.5 * (hi - lo); }
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

struct VPolytope {
  std::vector<Vector> points;
};

// {center + sum_i lambda_i g_i : lambda_i in [-1, 1]}
struct Zonotope {
  Vector center;
  std::vector<Vector> generators;
};

class ConvexBody {
 public:
  using Repr = std::variant<PointSet, Interval1D, VPolytope, Zonotope>;
  enum class Kind { point, interval, vpolytope, zonotope };

  static ConvexBody point(Vector p);
  static ConvexBody interval(double lo, double hi);
  // Exact duplicate points are removed.
  static ConvexBody vpolytope(std::vector<Vector> points);
  // Zero-norm generators are removed.
  static ConvexBody zonotope(Vector center, std::vector<Vector> generators);

  Kind kind() const { return static_cast<Kind>(repr_.index()); }
  int dim() const { return dim_; }
  const Repr& repr() const { return repr_; }

  const PointSet* as_point() const { return std::get_if<PointSet>(&repr_); }
  const Interval1D* as_interval() const { return std::get_if<Interval1D>(&repr_); }
  const VPolytope* as_vpolytope() const { return std::get_if<VPolytope>(&repr_); }
  const Zonotope* as_zonotope() const { return std::get_if<Zonotope>(&repr_); }

 private:
  ConvexBody(Repr r, int dim) : repr_(std::move(r)), dim_(dim) {}
  Repr repr_;
  int dim_;
};

// Unit vector, |u| = 1 within 1e-12.
class Direction {
 public:
  explicit Direction(Vector u);
  static Direction normalized(const Vector& v);
  const Vector& vec() const { return u_; }
  int dim() const { return static_cast<int>(u_.size()); }

 private:
  Vector u_;
};

// Maximum number of zonotope generators for which extreme points are
// enumerated exhaustively (2^k sign patterns).
inline constexpr int kMaxEnumeratedGenerators = 20;

struct SearchOptions {
  int grid_directions = 10000;     // d <= 3 deterministic grid
  int random_directions = 1000;    // d > 3
  int ascent_steps = 50;           // refinement per best candidate
  int ascent_candidates = 5;
  std::uint64_t seed = 0x5eed;
};

// Result of a set metric. `exact` is false when the value came from direction
// sampling and is only a certified lower bound; `evaluations` is the search
// budget that was spent (vertices or directions).
struct SetDistance {
  double value = 0.0;
  bool exact = true;
  std::size_t evaluations = 0;
};

struct Projection {
  Vector point;        // feasible point in the body
  double distance = 0.0;     // |y - point|, an upper bound on the true distance
  double lower_bound = 0.0;  // certified lower bound from the support function
  bool certified = true;     // distance - lower_bound <= tolerance
};

double support(const ConvexBody& body, const Direction& u);
// Support function for an arbitrary (not necessarily unit) vector.
double support_unnormalized(const ConvexBody& body, const Vector& u);
// A point of the body attaining the support value in direction u.
Vector support_point(const ConvexBody& body, const Vector& u);

Projection project(const Vector& y, const ConvexBody& body, double tol = 1e-9);
double dist_point_to_body(const Vector& y, const ConvexBody& body);

// Points of the body containing every extreme point; nullopt for zonotopes
// with more than kMaxEnumeratedGenerators generators.
std::optional<std::vector<Vector>> extreme_point_superset(const ConvexBody& body);

SetDistance deviation(const ConvexBody& a, const ConvexBody& b, const SearchOptions& opts = {});
SetDistance hausdorff(const ConvexBody& a, const ConvexBody& b, const SearchOptions& opts = {});
// sup over unit u of |h_A(u) - h_B(u)|. Exact for d <= 2; direction
// sampling plus ascent otherwise.
SetDistance hausdorff_support(const ConvexBody& a, const ConvexBody& b, const SearchOptions& opts = {});

ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b);
ConvexBody convex_hull(const std::vector<Vector>& points);

// Scale a body about the origin by alpha (alpha may be negative).
ConvexBody scaled(const ConvexBody& body, double alpha);

}  // namespace subdiff

#endif
