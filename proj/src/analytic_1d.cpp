#include "subdiff/analytic_1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

namespace subdiff {

PiecewiseLinearConvexFn::PiecewiseLinearConvexFn(std::vector<double> breakpoints, std::vector<double> slopes,
                                                 double value0)
    : bps_(std::move(breakpoints)), slopes_(std::move(slopes)), value0_(value0) {
  require(slopes_.size() == bps_.size() + 1, ErrorCode::invalid_argument,
          "piecewise-linear: need one more slope than breakpoints");
  for (std::size_t i = 1; i < bps_.size(); ++i)
    require(bps_[i] > bps_[i - 1], ErrorCode::invalid_argument, "piecewise-linear: breakpoints must increase");
  for (std::size_t i = 1; i < slopes_.size(); ++i)
    require(slopes_[i] >= slopes_[i - 1], ErrorCode::invalid_argument, "piecewise-linear: slopes must be nondecreasing");
}

PiecewiseLinearConvexFn PiecewiseLinearConvexFn::abs_sum(const std::vector<std::pair<double, double>>& weight_center) {
  std::map<double, double> w;
  double left = 0.0, v0 = 0.0;
  for (const auto& [weight, center] : weight_center) {
    require(weight > 0.0, ErrorCode::invalid_argument, "abs_sum: weights must be positive");
    w[center] += weight;
    left -= weight;
    v0 += weight * std::abs(center);
  }
  std::vector<double> bps, slopes{left};
  for (const auto& [c, wt] : w) {
    bps.push_back(c);
    slopes.push_back(slopes.back() + 2.0 * wt);
  }
  return PiecewiseLinearConvexFn(std::move(bps), std::move(slopes), v0);
}

double PiecewiseLinearConvexFn::value(double x) const {
  const double lo = std::min(0.0, x), hi = std::max(0.0, x);
  double integral = 0.0;
  double left = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < slopes_.size(); ++i) {
    const double right = i < bps_.size() ? bps_[i] : std::numeric_limits<double>::infinity();
    const double p = std::max(lo, left), q = std::min(hi, right);
    if (q > p) integral += slopes_[i] * (q - p);
    left = right;
  }
  return x >= 0.0 ? value0_ + integral : value0_ - integral;
}

Interval1D PiecewiseLinearConvexFn::exact_subdiff(double x) const {
  const auto it = std::lower_bound(bps_.begin(), bps_.end(), x);
  const auto k = static_cast<std::size_t>(it - bps_.begin());
  if (it != bps_.end() && *it == x) return {slopes_[k], slopes_[k + 1]};
  return {slopes_[k], slopes_[k]};
}

double PiecewiseLinearConvexFn::right_derivative(double x) const {
  const auto k = static_cast<std::size_t>(std::upper_bound(bps_.begin(), bps_.end(), x) - bps_.begin());
  return slopes_[k];
}

ScalarConvexLoss PiecewiseLinearConvexFn::to_loss() const {
  return ScalarConvexLoss::from_slopes(bps_, slopes_, value0_);
}

double right_derivative_rule(const PiecewiseLinearConvexFn& f, double x) { return f.right_derivative(x); }

double interval_hausdorff(const Interval1D& p, const Interval1D& q) {
  return std::max(std::abs(p.lo - q.lo), std::abs(p.hi - q.hi));
}

std::vector<double> d1_candidates(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a,
                                  double b) {
  require(a < b, ErrorCode::invalid_argument, "window: need a < b");
  std::vector<double> cuts;
  for (const auto* f : {&f1, &f2})
    for (double t : f->breakpoints())
      if (t > a && t < b) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> out = cuts;
  double prev = a;
  for (double t : cuts) {
    out.push_back(0.5 * (prev + t));
    prev = t;
  }
  out.push_back(0.5 * (prev + b));
  return out;
}

double d1_on_points(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2,
                    const std::vector<double>& points) {
  double best = 0.0;
  for (double x : points) best = std::max(best, interval_hausdorff(f1.exact_subdiff(x), f2.exact_subdiff(x)));
  return best;
}

double selection_diff_on_points(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2,
                                const std::vector<double>& points, const SelectionRule& g1, const SelectionRule& g2) {
  double best = 0.0;
  for (double x : points) {
    const double v1 = g1(f1, x), v2 = g2(f2, x);
    require(f1.exact_subdiff(x).contains(v1, 1e-12) && f2.exact_subdiff(x).contains(v2, 1e-12),
            ErrorCode::invalid_argument, "selection rule left the subdifferential");
    best = std::max(best, std::abs(v1 - v2));
  }
  return best;
}

double d1_metric(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a, double b) {
  return d1_on_points(f1, f2, d1_candidates(f1, f2, a, b));
}

double selection_sup_diff(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a, double b,
                          const SelectionRule& g1, const SelectionRule& g2) {
  return selection_diff_on_points(f1, f2, d1_candidates(f1, f2, a, b), g1, g2);
}

std::vector<GraphSegment> subdiff_graph(const PiecewiseLinearConvexFn& f, double a, double b) {
  require(a < b, ErrorCode::invalid_argument, "window: need a < b");
  std::vector<GraphSegment> segs;
  const auto& bps = f.breakpoints();
  const auto& s = f.slopes();
  double left = a;
  for (std::size_t i = 0; i <= bps.size(); ++i) {
    const double right = i < bps.size() ? std::min(bps[i], b) : b;
    if (right > left) segs.push_back({left, s[i], right, s[i]});
    if (i < bps.size()) {
      if (bps[i] > a && bps[i] < b && s[i + 1] > s[i]) segs.push_back({bps[i], s[i], bps[i], s[i + 1]});
      left = std::max(left, bps[i]);
    }
    if (left >= b) break;
  }
  return segs;
}

namespace {

double point_segment_dist(double px, double py, const GraphSegment& s) {
  const double ex = s.x1 - s.x0, ey = s.y1 - s.y0;
  const double len2 = ex * ex + ey * ey;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - s.x0) * ex + (py - s.y0) * ey) / len2, 0.0, 1.0);
  const double dx = px - (s.x0 + t * ex), dy = py - (s.y0 + t * ey);
  return std::hypot(dx, dy);
}

struct Quad {
  double a, b, c;  // a t^2 + b t + c
};

void add_roots(const Quad& q, double lo, double hi, std::vector<double>& out) {
  const double scale = std::max({std::abs(q.a), std::abs(q.b), std::abs(q.c), 1e-300});
  if (std::abs(q.a) <= 1e-14 * scale) {
    if (std::abs(q.b) > 1e-14 * scale) {
      const double t = -q.c / q.b;
      if (t > lo && t < hi) out.push_back(t);
    }
    return;
  }
  const double disc = q.b * q.b - 4.0 * q.a * q.c;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  const double qq = -0.5 * (q.b + (q.b >= 0.0 ? sq : -sq));
  for (double t : {qq / q.a, qq != 0.0 ? q.c / qq : qq / q.a})
    if (t > lo && t < hi) out.push_back(t);
}

}  // namespace

double segment_set_deviation(const std::vector<GraphSegment>& A, const std::vector<GraphSegment>& B) {
  require(!B.empty(), ErrorCode::invalid_argument, "segment deviation: empty target set");
  auto phi = [&](double x, double y) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : B) d = std::min(d, point_segment_dist(x, y, s));
    return d;
  };
  double best = 0.0;
  for (const auto& s : A) {
    const double Lx = s.x1 - s.x0, Ly = s.y1 - s.y0;
    const double L = std::hypot(Lx, Ly);
    best = std::max({best, phi(s.x0, s.y0), phi(s.x1, s.y1)});
    if (L == 0.0) continue;
    const double dx = Lx / L, dy = Ly / L;
    // Cut [0, L] where the nearest point of any target switches regime.
    std::vector<double> cuts{0.0, L};
    for (const auto& q : B) {
      const double ex = q.x1 - q.x0, ey = q.y1 - q.y0;
      const double len = std::hypot(ex, ey);
      if (len == 0.0) continue;
      const double ux = ex / len, uy = ey / len;
      const double de = dx * ux + dy * uy;
      if (de == 0.0) continue;
      const double w0 = (s.x0 - q.x0) * ux + (s.y0 - q.y0) * uy;
      for (double target : {0.0, len}) {
        const double t = (target - w0) / de;
        if (t > 0.0 && t < L) cuts.push_back(t);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> cand;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k], hi = cuts[k + 1];
      cand.push_back(lo);
      const double tm = 0.5 * (lo + hi);
      const double px = s.x0 + tm * dx, py = s.y0 + tm * dy;
      std::vector<Quad> quads;
      for (const auto& q : B) {
        const double ex = q.x1 - q.x0, ey = q.y1 - q.y0;
        const double len = std::hypot(ex, ey);
        double qx = q.x0, qy = q.y0;
        bool interior = false;
        double ux = 0.0, uy = 0.0;
        if (len > 0.0) {
          ux = ex / len;
          uy = ey / len;
          const double proj = (px - q.x0) * ux + (py - q.y0) * uy;
          if (proj >= len) {
            qx = q.x1;
            qy = q.y1;
          } else if (proj > 0.0) {
            interior = true;
          }
        }
        const double wx = s.x0 - qx, wy = s.y0 - qy;
        Quad qd{1.0, 2.0 * (dx * wx + dy * wy), wx * wx + wy * wy};
        if (interior) {
          const double de = dx * ux + dy * uy, we = wx * ux + wy * uy;
          qd.a -= de * de;
          qd.b -= 2.0 * de * we;
          qd.c -= we * we;
        }
        quads.push_back(qd);
      }
      for (std::size_t i = 0; i < quads.size(); ++i)
        for (std::size_t j = i + 1; j < quads.size(); ++j)
          add_roots({quads[i].a - quads[j].a, quads[i].b - quads[j].b, quads[i].c - quads[j].c}, lo, hi, cand);
    }
    for (double t : cand) best = std::max(best, phi(s.x0 + t * dx, s.y0 + t * dy));
  }
  return best;
}

double d2_graph_metric(const PiecewiseLinearConvexFn& f1, const PiecewiseLinearConvexFn& f2, double a, double b) {
  const auto g1 = subdiff_graph(f1, a, b);
  const auto g2 = subdiff_graph(f2, a, b);
  return std::max(segment_set_deviation(g1, g2), segment_set_deviation(g2, g1));
}

PiecewiseLinearConvexFn random_pl_convex(Rng& rng, double a, double b, int max_breaks) {
  std::uniform_int_distribution<int> nk(0, std::max(0, max_breaks));
  std::uniform_real_distribution<double> pos(a, b), s0(-2.0, 2.0), inc(0.05, 1.5);
  const int k = nk(rng);
  std::vector<double> bps;
  for (int i = 0; i < k; ++i) bps.push_back(pos(rng));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<double> slopes{s0(rng)};
  for (std::size_t i = 0; i < bps.size(); ++i) slopes.push_back(slopes.back() + inc(rng));
  return PiecewiseLinearConvexFn(std::move(bps), std::move(slopes), s0(rng));
}

SelectionRule random_selection_rule(std::uint64_t seed) {
  return [seed](const PiecewiseLinearConvexFn& f, double x) {
    const Interval1D iv = f.exact_subdiff(x);
    if (iv.hi == iv.lo) return iv.lo;
    std::uint64_t bits = 0;
    std::memcpy(&bits, &x, sizeof bits);
    const double u = static_cast<double>(mix64(seed ^ mix64(bits)) >> 11) * 0x1.0p-53;
    return std::clamp(iv.lo + u * (iv.hi - iv.lo), iv.lo, iv.hi);
  };
}

PiecewiseLinearConvexFn remark_b_f1(int) { return PiecewiseLinearConvexFn::abs_sum({{1.0, 0.0}}); }

PiecewiseLinearConvexFn remark_b_f2(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
  const double h = 1.0 / n;
  return PiecewiseLinearConvexFn::abs_sum({{0.5, h}, {0.5, -h}});
}

}  // namespace subdiff
