#include "subdiff/scalar_loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subdiff {

ScalarConvexLoss::ScalarConvexLoss(std::string name, std::vector<KinkSpec> kinks, Fn h_sm, Fn g_sm, Fn reference,
                                   bool lipschitz)
    : name_(std::move(name)),
      kinks_(std::move(kinks)),
      h_sm_(std::move(h_sm)),
      g_sm_(std::move(g_sm)),
      reference_(std::move(reference)),
      lipschitz_(lipschitz) {
  require(static_cast<bool>(h_sm_) && static_cast<bool>(g_sm_), ErrorCode::invalid_argument,
          "loss: smooth part callables required");
  for (std::size_t j = 0; j < kinks_.size(); ++j) {
    require(std::isfinite(kinks_[j].t) && std::isfinite(kinks_[j].a), ErrorCode::invalid_argument,
            "loss: non-finite kink");
    require(kinks_[j].a > 0.0, ErrorCode::invalid_argument, "loss: kink jump must be positive");
    if (j > 0)
      require(kinks_[j].t > kinks_[j - 1].t, ErrorCode::invalid_argument,
              "loss: kink locations must be strictly increasing");
  }
}

ScalarConvexLoss ScalarConvexLoss::quadratic(std::string name, std::vector<KinkSpec> kinks, double q0, double q1,
                                             double q2, Fn reference, bool lipschitz) {
  require(q2 >= 0.0, ErrorCode::invalid_argument, "loss: smooth part must be convex");
  ScalarConvexLoss out(
      std::move(name), std::move(kinks), [=](double z) { return q0 + q1 * z + q2 * z * z; },
      [=](double z) { return q1 + 2.0 * q2 * z; }, std::move(reference), lipschitz);
  out.quad_ = std::array<double, 3>{q0, q1, q2};
  return out;
}

ScalarConvexLoss ScalarConvexLoss::abs_loss() {
  return quadratic("abs", {{0.0, 2.0}}, 0.0, -1.0, 0.0, [](double z) { return std::abs(z); });
}

ScalarConvexLoss ScalarConvexLoss::hinge() {
  return quadratic("hinge", {{0.0, 1.0}}, 0.0, 0.0, 0.0, [](double z) { return std::max(z, 0.0); });
}

ScalarConvexLoss ScalarConvexLoss::pinball(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_argument, "pinball: alpha must lie in (0,1)");
  return quadratic("pinball", {{0.0, 1.0}}, 0.0, alpha - 1.0, 0.0,
                   [alpha](double z) { return z >= 0.0 ? alpha * z : (alpha - 1.0) * z; });
}

ScalarConvexLoss ScalarConvexLoss::square() {
  return quadratic("square", {}, 0.0, 0.0, 1.0, [](double z) { return z * z; }, false);
}

ScalarConvexLoss ScalarConvexLoss::builtin(const std::string& name, double pinball_alpha) {
  if (name == "abs") return abs_loss();
  if (name == "hinge") return hinge();
  if (name == "pinball") return pinball(pinball_alpha);
  if (name == "square") return square();
  fail(ErrorCode::invalid_argument, "unknown loss '" + name + "'");
}

ScalarConvexLoss ScalarConvexLoss::from_slopes(std::vector<double> breakpoints, std::vector<double> slopes,
                                               double value0) {
  require(slopes.size() == breakpoints.size() + 1, ErrorCode::invalid_argument,
          "from_slopes: need one more slope than breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    require(breakpoints[i] > breakpoints[i - 1], ErrorCode::invalid_argument,
            "from_slopes: breakpoints must be strictly increasing");
  for (std::size_t i = 1; i < slopes.size(); ++i)
    require(slopes[i] >= slopes[i - 1], ErrorCode::invalid_argument, "from_slopes: slopes must be nondecreasing");

  std::vector<KinkSpec> kinks;
  double offset = value0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double a = slopes[i + 1] - slopes[i];
    if (a <= 0.0) continue;
    kinks.push_back({breakpoints[i], a});
    offset -= a * std::max(0.0, -breakpoints[i]);
  }

  // Reference: integrate the slope function from 0.
  auto ref = [breakpoints, slopes, value0](double z) {
    const double lo = std::min(0.0, z), hi = std::max(0.0, z);
    double integral = 0.0;
    double left = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      const double right = i < breakpoints.size() ? breakpoints[i] : std::numeric_limits<double>::infinity();
      const double a = std::max(lo, left), b = std::min(hi, right);
      if (b > a) integral += slopes[i] * (b - a);
      left = right;
    }
    return z >= 0.0 ? value0 + integral : value0 - integral;
  };
  return quadratic("piecewise_linear", std::move(kinks), offset, slopes.front(), 0.0, ref);
}

double ScalarConvexLoss::h_sm(double z) const { return h_sm_(z); }
double ScalarConvexLoss::g_sm(double z) const { return g_sm_(z); }

double ScalarConvexLoss::h_ns(double z) const {
  double v = 0.0;
  for (const auto& k : kinks_) v += k.a * std::max(0.0, z - k.t);
  return v;
}

double ScalarConvexLoss::eval(double z) const { return h_sm(z) + h_ns(z); }

double ScalarConvexLoss::reference(double z) const {
  require(has_reference(), ErrorCode::unavailable, "loss '" + name_ + "' has no reference formula");
  return reference_(z);
}

Interval1D ScalarConvexLoss::subdiff_interval(double z) const {
  const double g = g_sm(z);
  double lo = g, hi = g;
  for (const auto& k : kinks_) {
    if (k.t < z) lo += k.a;
    if (k.t <= z) hi += k.a;
  }
  return {lo, hi};
}

double ScalarConvexLoss::selection_g(double z) const {
  double g = g_sm(z);
  for (const auto& k : kinks_)
    if (z >= k.t) g += k.a;
  return g;
}

double ScalarConvexLoss::zeta() const {
  double s = 1.0;
  for (const auto& k : kinks_) s += k.a;
  return s;
}

int ScalarConvexLoss::kink_index(double z, double tol) const {
  for (std::size_t j = 0; j < kinks_.size(); ++j)
    if (std::abs(z - kinks_[j].t) < tol || z == kinks_[j].t) return static_cast<int>(j);
  return -1;
}

ScalarConvexLoss ScalarConvexLoss::scaled(double alpha) const {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::invalid_argument, "loss scale must be positive");
  std::vector<KinkSpec> ks = kinks_;
  for (auto& k : ks) k.a *= alpha;
  Fn ref;
  if (reference_) ref = [r = reference_, alpha](double z) { return alpha * r(z); };
  if (quad_) {
    const auto& q = *quad_;
    return quadratic(name_, std::move(ks), alpha * q[0], alpha * q[1], alpha * q[2], std::move(ref), lipschitz_);
  }
  return ScalarConvexLoss(
      name_, std::move(ks), [f = h_sm_, alpha](double z) { return alpha * f(z); },
      [f = g_sm_, alpha](double z) { return alpha * f(z); }, std::move(ref), lipschitz_);
}

DecomposeReport decompose_check(const ScalarConvexLoss& h, const std::vector<double>& grid) {
  require(!grid.empty(), ErrorCode::invalid_argument, "decompose_check: empty grid");
  DecomposeReport rep;
  std::vector<double> zs = grid;
  std::sort(zs.begin(), zs.end());
  for (double z : zs) {
    if (!h.has_reference()) break;
    const double r = std::abs(h.eval(z) - h.reference(z));
    rep.max_residual = std::max(rep.max_residual, r);
    if (r > 1e-9 * std::max(1.0, std::abs(h.reference(z)))) rep.violations.push_back(z);
  }
  for (const auto& k : h.kinks()) {
    const double step = 1e-9 * std::max(1.0, std::abs(k.t));
    const double jump = std::abs(h.g_sm(k.t + step) - h.g_sm(k.t - step));
    rep.max_gsm_jump = std::max(rep.max_gsm_jump, jump);
    if (jump > 1e-6) rep.violations.push_back(k.t);
  }
  for (std::size_t i = 1; i < zs.size(); ++i) {
    const double drop = h.g_sm(zs[i - 1]) - h.g_sm(zs[i]);
    rep.max_monotone_violation = std::max(rep.max_monotone_violation, drop);
    if (drop > 1e-12) rep.violations.push_back(zs[i]);
  }
  for (std::size_t i = 1; i + 1 < zs.size(); ++i) {
    const double mid = 0.5 * (zs[i - 1] + zs[i + 1]);
    const double gap = h.eval(mid) - 0.5 * (h.eval(zs[i - 1]) + h.eval(zs[i + 1]));
    rep.max_convexity_violation = std::max(rep.max_convexity_violation, gap);
    if (gap > 1e-9) rep.violations.push_back(mid);
  }
  rep.ok = rep.violations.empty();
  return rep;
}

}  // namespace subdiff
