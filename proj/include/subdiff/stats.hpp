#ifndef SUBDIFF_STATS_HPP
#define SUBDIFF_STATS_HPP

#include <cstddef>
#include <vector>

namespace subdiff {

// Linear-interpolated quantile (p in [0, 1]) of an unsorted sample.
double quantile(std::vector<double> v, double p);
double median(std::vector<double> v);

struct CellSummary {
  double key = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t n = 0;
};

CellSummary summarize_cell(double key, const std::vector<double>& values);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<CellSummary> cells;
};

// Least squares of log(median) on log(key); needs >= 4 cells with positive
// keys and medians.
RateFit fit_loglog(const std::vector<CellSummary>& cells);
RateFit fit_loglog(const std::vector<double>& keys, const std::vector<double>& values);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace subdiff

#endif
