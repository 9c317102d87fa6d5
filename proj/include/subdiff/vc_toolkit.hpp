#ifndef SUBDIFF_VC_TOOLKIT_HPP
#define SUBDIFF_VC_TOOLKIT_HPP

// Shattering search and sign-pattern counting for threshold classes
// {xi : c(x; xi) >= t}, plus the scan bound and the rate quantity Delta.

#include "subdiff/composite_models.hpp"

#include <functional>
#include <string>
#include <vector>

namespace subdiff {

struct ThresholdFamily {
  std::string name;
  int param_dim = 1;
  int degree = 1;
  int point_dim = 1;  // flat length of one xi
  std::function<double(const Vector& x, const double* xi)> c;
  std::function<void(Rng&, double* xi)> sample_point;

  // xi = (features, b) of the model; points sampled N(0,1) coordinatewise.
  static ThresholdFamily from_model(const CompositeModel& model);
  // c(x; xi) = xi[0], independent of x.
  static ThresholdFamily constant();
};

struct ShatterWitness {
  bool found = false;
  Vector x;
  double t = 0.0;
};

struct ShatterCertificate {
  int N = 0;
  Matrix points;                        // point_dim x N
  std::vector<ShatterWitness> witness;  // index = labeling bitmask (bit i = point i labeled 1)
  std::size_t budget_used = 0;
  std::uint64_t seed = 0;

  bool shattered() const;
  std::size_t realized() const;
  // Re-evaluates every witness; true iff all found witnesses reproduce
  // their labeling exactly.
  bool reverify(const ThresholdFamily& family) const;
  std::string to_json() const;
};

inline constexpr int kMaxShatterPoints = 16;

struct ShatterOptions {
  int budget = 10000;          // random parameter draws
  int refine_iterations = 400;  // Nelder-Mead iterations per missing labeling
  int threads = 1;
};

ShatterCertificate check_shatter(const ThresholdFamily& family, const Matrix& points, std::uint64_t seed,
                                 const ShatterOptions& opts = {});

// Largest N <= n_max for which a seeded point configuration was certified
// shattered (tries `configs` configurations per N).
int vc_lower_bound(const ThresholdFamily& family, int n_max, std::uint64_t seed, const ShatterOptions& opts = {},
                   int configs = 3, std::vector<ShatterCertificate>* certs = nullptr);

struct SignPatternCount {
  std::size_t count = 0;
  double bound = 0.0;  // (50 K N / d)^d
  bool within_bound = true;
  std::size_t evaluations = 0;
};

using Polynomial = std::function<double(const Vector&)>;

SignPatternCount count_sign_patterns(const std::vector<Polynomial>& polys, int d, int K, int budget,
                                     std::uint64_t seed);
double sign_pattern_bound(int N, int d, int K);

// Smallest N with (50 K N / (d+1))^(d+1) < 2^N.
int vc_upper_bound_poly(int d, int K);
// sqrt((d + vc log m + log(1/delta)) / m)
double delta_rate(int d, double vc, double m, double delta);

}  // namespace subdiff

#endif
