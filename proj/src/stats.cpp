#include "subdiff/stats.hpp"
#include "subdiff/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace subdiff {

double quantile(std::vector<double> v, double p) {
  require(!v.empty(), ErrorCode::invalid_argument, "quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

CellSummary summarize_cell(double key, const std::vector<double>& values) {
  return {key, quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75), values.size()};
}

RateFit fit_loglog(const std::vector<CellSummary>& cells) {
  require(cells.size() >= 4, ErrorCode::invalid_argument, "fit_loglog: need at least 4 cells");
  std::vector<double> lx, ly;
  for (const auto& c : cells) {
    require(c.key > 0.0, ErrorCode::invalid_argument, "fit_loglog: keys must be positive");
    require(c.median > 0.0, ErrorCode::invalid_argument, "fit_loglog: medians must be positive");
    lx.push_back(std::log(c.key));
    ly.push_back(std::log(c.median));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  require(sxx > 0.0, ErrorCode::invalid_argument, "fit_loglog: keys must not all be equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.cells = cells;
  return fit;
}

RateFit fit_loglog(const std::vector<double>& keys, const std::vector<double>& values) {
  require(keys.size() == values.size(), ErrorCode::invalid_argument, "fit_loglog: size mismatch");
  std::vector<CellSummary> cells;
  for (std::size_t i = 0; i < keys.size(); ++i) cells.push_back({keys[i], values[i], values[i], values[i], 1});
  return fit_loglog(cells);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::invalid_argument, "spearman: need paired samples");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace subdiff
