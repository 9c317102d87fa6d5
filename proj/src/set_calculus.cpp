#include "subdiff/set_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace subdiff {

namespace {

Vector scalar_vec(double v) {
  Vector out(1);
  out[0] = v;
  return out;
}

bool same_point(const Vector& a, const Vector& b) { return a.size() == b.size() && (a.array() == b.array()).all(); }

}  // namespace

ConvexBody ConvexBody::point(Vector p) {
  require(p.size() >= 1, ErrorCode::invalid_argument, "point: dimension must be >= 1");
  require(p.allFinite(), ErrorCode::invalid_argument, "point: non-finite coordinate");
  const int d = static_cast<int>(p.size());
  return ConvexBody(PointSet{std::move(p)}, d);
}

ConvexBody ConvexBody::interval(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi), ErrorCode::invalid_argument, "interval: non-finite endpoint");
  require(lo <= hi, ErrorCode::invalid_argument, "interval: lo > hi");
  return ConvexBody(Interval1D{lo, hi}, 1);
}

ConvexBody ConvexBody::vpolytope(std::vector<Vector> points) {
  require(!points.empty(), ErrorCode::invalid_argument, "vpolytope: empty point list");
  const auto d = points.front().size();
  require(d >= 1, ErrorCode::invalid_argument, "vpolytope: dimension must be >= 1");
  std::vector<Vector> unique;
  unique.reserve(points.size());
  for (auto& p : points) {
    require_dim(p.size(), d, "vpolytope");
    require(p.allFinite(), ErrorCode::invalid_argument, "vpolytope: non-finite coordinate");
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Vector& q) { return same_point(p, q); });
    if (!dup) unique.push_back(std::move(p));
  }
  return ConvexBody(VPolytope{std::move(unique)}, static_cast<int>(d));
}

ConvexBody ConvexBody::zonotope(Vector center, std::vector<Vector> generators) {
  const auto d = center.size();
  require(d >= 1, ErrorCode::invalid_argument, "zonotope: dimension must be >= 1");
  require(center.allFinite(), ErrorCode::invalid_argument, "zonotope: non-finite center");
  std::vector<Vector> kept;
  kept.reserve(generators.size());
  for (auto& g : generators) {
    require_dim(g.size(), d, "zonotope generator");
    require(g.allFinite(), ErrorCode::invalid_argument, "zonotope: non-finite generator");
    if (g.squaredNorm() > 0.0) kept.push_back(std::move(g));
  }
  return ConvexBody(Zonotope{std::move(center), std::move(kept)}, static_cast<int>(d));
}

Direction::Direction(Vector u) : u_(std::move(u)) {
  require(u_.size() >= 1, ErrorCode::invalid_argument, "direction: empty vector");
  require(std::abs(u_.norm() - 1.0) <= 1e-12, ErrorCode::invalid_argument, "direction: not a unit vector");
}

Direction Direction::normalized(const Vector& v) {
  const double n = v.norm();
  require(n > 0.0 && std::isfinite(n), ErrorCode::invalid_argument, "direction: cannot normalize zero vector");
  return Direction(v / n);
}

double support_unnormalized(const ConvexBody& body, const Vector& u) {
  require_dim(u.size(), body.dim(), "support");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return s.p.dot(u);
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          return std::max(s.lo * u[0], s.hi * u[0]);
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          double best = -std::numeric_limits<double>::infinity();
          for (const auto& p : s.points) best = std::max(best, p.dot(u));
          return best;
        } else {
          double v = s.center.dot(u);
          for (const auto& g : s.generators) v += std::abs(g.dot(u));
          return v;
        }
      },
      body.repr());
}

double support(const ConvexBody& body, const Direction& u) { return support_unnormalized(body, u.vec()); }

Vector support_point(const ConvexBody& body, const Vector& u) {
  require_dim(u.size(), body.dim(), "support_point");
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return s.p;
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          return scalar_vec(u[0] >= 0.0 ? s.hi : s.lo);
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          std::size_t best = 0;
          double bv = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < s.points.size(); ++i) {
            const double v = s.points[i].dot(u);
            if (v > bv) {
              bv = v;
              best = i;
            }
          }
          return s.points[best];
        } else {
          Vector p = s.center;
          for (const auto& g : s.generators) {
            const double t = g.dot(u);
            if (t > 0.0) p += g;
            else if (t < 0.0) p -= g;
          }
          return p;
        }
      },
      body.repr());
}

namespace {

// Affine minimum-norm combination of the points indexed by S.
Eigen::VectorXd affine_min_norm(const std::vector<Vector>& q, const std::vector<int>& S) {
  const int k = static_cast<int>(S.size());
  Matrix sys = Matrix::Zero(k + 1, k + 1);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double v = q[S[i]].dot(q[S[j]]);
      sys(i, j) = v;
      sys(j, i) = v;
    }
    sys(i, k) = 1.0;
    sys(k, i) = 1.0;
  }
  Vector rhs = Vector::Zero(k + 1);
  rhs[k] = 1.0;
  Vector sol = sys.completeOrthogonalDecomposition().solve(rhs);
  return sol.head(k);
}

// Wolfe's minimum-norm-point algorithm on conv{q_i}.
Vector wolfe_min_norm(const std::vector<Vector>& q) {
  const int n = static_cast<int>(q.size());
  double scale = 0.0;
  int start = 0;
  for (int i = 0; i < n; ++i) {
    const double s = q[i].squaredNorm();
    scale = std::max(scale, s);
    if (s < q[start].squaredNorm()) start = i;
  }
  if (scale == 0.0) return q[start];
  const double eps = 1e-15 * scale;

  std::vector<int> S{start};
  std::vector<double> w{1.0};
  Vector x = q[start];
  const int max_major = 50 * n + 200;
  for (int major = 0; major < max_major; ++major) {
    int j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double v = x.dot(q[i]);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (x.squaredNorm() - best <= eps) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    w.push_back(0.0);

    for (int minor = 0; minor < n + 5; ++minor) {
      const Vector alpha = affine_min_norm(q, S);
      const double floor = 1e-14;
      if ((alpha.array() > floor).all()) {
        for (std::size_t i = 0; i < S.size(); ++i) w[i] = alpha[static_cast<Eigen::Index>(i)];
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < S.size(); ++i) {
        const double a = alpha[static_cast<Eigen::Index>(i)];
        if (a <= floor && w[i] - a > 0.0) theta = std::min(theta, w[i] / (w[i] - a));
      }
      for (std::size_t i = 0; i < S.size(); ++i)
        w[i] = (1.0 - theta) * w[i] + theta * alpha[static_cast<Eigen::Index>(i)];
      std::vector<int> S2;
      std::vector<double> w2;
      for (std::size_t i = 0; i < S.size(); ++i) {
        if (w[i] > floor) {
          S2.push_back(S[i]);
          w2.push_back(w[i]);
        }
      }
      if (S2.empty()) {
        // Numerical breakdown; restart from the newest point.
        S2.push_back(S.back());
        w2.push_back(1.0);
      }
      S = std::move(S2);
      w = std::move(w2);
      double sum = 0.0;
      for (double v : w) sum += v;
      for (double& v : w) v /= sum;
    }
    x.setZero(q[0].size());
    for (std::size_t i = 0; i < S.size(); ++i) x += w[i] * q[S[i]];
  }
  return x;
}

Projection finish_projection(const Vector& y, const ConvexBody& body, Vector p, double tol) {
  Projection out;
  const Vector diff = y - p;
  out.distance = diff.norm();
  out.point = std::move(p);
  if (out.distance <= tol) {
    out.lower_bound = 0.0;
    out.certified = true;
    return out;
  }
  const Vector u = diff / out.distance;
  out.lower_bound = std::max(0.0, y.dot(u) - support_unnormalized(body, u));
  out.certified = out.distance - out.lower_bound <= tol;
  return out;
}

// Active-set solve of min |G lam - b| over the box |lam_j| <= 1, warm
// started from lam. Falls back to a single coordinate step whenever freeing a
// bound coordinate fails to move it inward, so the residual never increases.
void box_least_squares(const Matrix& G, const Vector& b, Vector& lam) {
  const Eigen::Index k = lam.size();
  std::vector<char> fixed(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    lam[j] = std::clamp(lam[j], -1.0, 1.0);
    fixed[static_cast<std::size_t>(j)] = std::abs(lam[j]) == 1.0;
  }
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff() * (b.cwiseAbs().maxCoeff() + G.cwiseAbs().sum()));
  const double kkt_tol = 1e-14 * scale;
  Eigen::Index pending = -1;  // coordinate freed in the last outer step
  for (int outer = 0; outer < 8 * static_cast<int>(k) + 64; ++outer) {
    for (int inner = 0; inner <= k; ++inner) {
      std::vector<Eigen::Index> F;
      for (Eigen::Index j = 0; j < k; ++j)
        if (!fixed[static_cast<std::size_t>(j)]) F.push_back(j);
      if (F.empty()) break;
      Matrix GF(G.rows(), static_cast<Eigen::Index>(F.size()));
      Vector lf(static_cast<Eigen::Index>(F.size()));
      Vector rhs = b;
      for (Eigen::Index j = 0; j < k; ++j)
        if (fixed[static_cast<std::size_t>(j)]) rhs -= lam[j] * G.col(j);
      for (std::size_t i = 0; i < F.size(); ++i) {
        GF.col(static_cast<Eigen::Index>(i)) = G.col(F[i]);
        lf[static_cast<Eigen::Index>(i)] = lam[F[i]];
      }
      const Vector z = GF.completeOrthogonalDecomposition().solve(rhs);
      if (pending >= 0) {
        const auto it = std::find(F.begin(), F.end(), pending);
        const auto pi = static_cast<Eigen::Index>(it - F.begin());
        const double dir = z[pi] - lf[pi];
        if ((lam[pending] >= 1.0 && dir >= 0.0) || (lam[pending] <= -1.0 && dir <= 0.0)) {
          // exact coordinate step instead
          const Vector r = G * lam - b;
          const double n2 = G.col(pending).squaredNorm();
          lam[pending] = std::clamp(lam[pending] - G.col(pending).dot(r) / n2, -1.0, 1.0);
          fixed[static_cast<std::size_t>(pending)] = std::abs(lam[pending]) == 1.0;
          pending = -1;
          continue;
        }
        pending = -1;
      }
      double alpha = 1.0;
      Eigen::Index hit = -1;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double from = lf[i], to = z[i];
        double a = 1.0;
        if (to > 1.0) a = (1.0 - from) / (to - from);
        else if (to < -1.0) a = (-1.0 - from) / (to - from);
        if (a < alpha) {
          alpha = std::max(0.0, a);
          hit = i;
        }
      }
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        double v = lf[i] + alpha * (z[i] - lf[i]);
        if (i == hit) v = z[i] > 1.0 ? 1.0 : -1.0;
        lam[F[static_cast<std::size_t>(i)]] = std::clamp(v, -1.0, 1.0);
      }
      if (hit < 0) break;
      fixed[static_cast<std::size_t>(F[static_cast<std::size_t>(hit)])] = 1;
    }
    const Vector w = G.transpose() * (G * lam - b);
    Eigen::Index worst = -1;
    double viol = kkt_tol;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!fixed[static_cast<std::size_t>(j)]) continue;
      const double v = lam[j] >= 1.0 ? w[j] : -w[j];
      if (v > viol) {
        viol = v;
        worst = j;
      }
    }
    if (worst < 0) return;
    fixed[static_cast<std::size_t>(worst)] = 0;
    pending = worst;
  }
}

Projection project_zonotope(const Vector& y, const ConvexBody& body, const Zonotope& z, double tol) {
  const std::size_t k = z.generators.size();
  if (k == 0) return finish_projection(y, body, z.center, tol);
  std::vector<double> lambda(k, 0.0), n2(k);
  for (std::size_t j = 0; j < k; ++j) n2[j] = z.generators[j].squaredNorm();
  Vector r = z.center - y;
  const int warm_sweeps = 256;
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < warm_sweeps; ++sweep) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto& g = z.generators[j];
      const double nv = std::clamp(lambda[j] - g.dot(r) / n2[j], -1.0, 1.0);
      const double delta = nv - lambda[j];
      if (delta != 0.0) {
        r += delta * g;
        lambda[j] = nv;
      }
    }
    if (sweep % 64 == 63) {
      r = z.center - y;
      for (std::size_t j = 0; j < k; ++j) r += lambda[j] * z.generators[j];
    }
    if (sweep % 4 == 0) {
      Projection cur = finish_projection(y, body, y + r, tol);
      if (cur.distance - cur.lower_bound < best.distance - best.lower_bound || !std::isfinite(best.distance))
        best = cur;
      if (cur.certified) return cur;
    }
  }
  const auto d = static_cast<Eigen::Index>(y.size());
  Matrix G(d, static_cast<Eigen::Index>(k));
  Vector lam(static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    G.col(static_cast<Eigen::Index>(j)) = z.generators[j];
    lam[static_cast<Eigen::Index>(j)] = lambda[j];
  }
  box_least_squares(G, y - z.center, lam);
  Projection cur = finish_projection(y, body, z.center + G * lam, tol);
  if (cur.distance - cur.lower_bound < best.distance - best.lower_bound) best = cur;
  return best;
}

}  // namespace

Projection project(const Vector& y, const ConvexBody& body, double tol) {
  require_dim(y.size(), body.dim(), "project");
  return std::visit(
      [&](const auto& s) -> Projection {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return finish_projection(y, body, s.p, tol);
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          return finish_projection(y, body, scalar_vec(std::clamp(y[0], s.lo, s.hi)), tol);
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          std::vector<Vector> q;
          q.reserve(s.points.size());
          for (const auto& p : s.points) q.push_back(p - y);
          return finish_projection(y, body, y + wolfe_min_norm(q), tol);
        } else {
          return project_zonotope(y, body, s, tol);
        }
      },
      body.repr());
}

double dist_point_to_body(const Vector& y, const ConvexBody& body) { return project(y, body).distance; }

std::optional<std::vector<Vector>> extreme_point_superset(const ConvexBody& body) {
  return std::visit(
      [&](const auto& s) -> std::optional<std::vector<Vector>> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return std::vector<Vector>{s.p};
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          return std::vector<Vector>{scalar_vec(s.lo), scalar_vec(s.hi)};
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          return s.points;
        } else {
          const std::size_t k = s.generators.size();
          if (k > static_cast<std::size_t>(kMaxEnumeratedGenerators)) return std::nullopt;
          // Gray-code walk over all sign patterns.
          std::vector<Vector> out;
          out.reserve(std::size_t{1} << k);
          Vector p = s.center;
          for (const auto& g : s.generators) p -= g;
          out.push_back(p);
          std::vector<int> sign(k, -1);
          for (std::size_t i = 1; i < (std::size_t{1} << k); ++i) {
            const auto bit = static_cast<std::size_t>(__builtin_ctzll(i));
            p += (-2.0 * sign[bit]) * s.generators[bit];
            sign[bit] = -sign[bit];
            out.push_back(p);
          }
          return out;
        }
      },
      body.repr());
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vector unit2(double theta) {
  Vector u(2);
  u << std::cos(theta), std::sin(theta);
  return u;
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0.0 ? t + kTwoPi : t;
}

std::vector<Vector> hull2d(std::vector<Vector> pts);

// Angles (in [0, 2pi)) at which the maximizer of <p, u(theta)> can change.
void support_breakpoints_2d(const ConvexBody& body, std::vector<double>& out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, VPolytope>) {
          const auto h = hull2d(s.points);
          for (std::size_t i = 0; i < h.size(); ++i) {
            const Vector e = h[(i + 1) % h.size()] - h[i];
            if (e.squaredNorm() == 0.0) continue;
            const double a = std::atan2(e[1], e[0]);
            out.push_back(wrap_angle(a + 0.5 * std::numbers::pi));
            out.push_back(wrap_angle(a - 0.5 * std::numbers::pi));
          }
        } else if constexpr (std::is_same_v<T, Zonotope>) {
          for (const auto& g : s.generators) {
            const double a = std::atan2(g[1], g[0]);
            out.push_back(wrap_angle(a + 0.5 * std::numbers::pi));
            out.push_back(wrap_angle(a - 0.5 * std::numbers::pi));
          }
        }
      },
      body.repr());
}

struct GapSup {
  double value;
  bool exact;
  std::size_t evaluations;
};

double gap_at(const ConvexBody& a, const ConvexBody& b, const Vector& u, bool absolute) {
  const double g = support_unnormalized(a, u) - support_unnormalized(b, u);
  return absolute ? std::abs(g) : g;
}

// sup over unit u of h_A(u) - h_B(u) (or its absolute value).
GapSup support_gap_sup(const ConvexBody& a, const ConvexBody& b, bool absolute, const SearchOptions& opts) {
  require_dim(a.dim(), b.dim(), "support gap");
  const int d = a.dim();
  if (d == 1) {
    const double v = std::max(gap_at(a, b, scalar_vec(1.0), absolute), gap_at(a, b, scalar_vec(-1.0), absolute));
    return {v, true, 2};
  }
  if (d == 2) {
    std::vector<double> angles{0.0};
    support_breakpoints_2d(a, angles);
    support_breakpoints_2d(b, angles);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    double best = -std::numeric_limits<double>::infinity();
    std::size_t evals = 0;
    const std::size_t n = angles.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = angles[i];
      const double hi = (i + 1 < n) ? angles[i + 1] : angles[0] + kTwoPi;
      best = std::max(best, gap_at(a, b, unit2(lo), absolute));
      ++evals;
      const Vector um = unit2(0.5 * (lo + hi));
      const Vector w = support_point(a, um) - support_point(b, um);
      if (w.squaredNorm() == 0.0) continue;
      for (double sgn : {1.0, -1.0}) {
        if (sgn < 0.0 && !absolute) break;
        double t = std::atan2(sgn * w[1], sgn * w[0]);
        while (t < lo) t += kTwoPi;
        if (t <= hi) {
          best = std::max(best, gap_at(a, b, unit2(t), absolute));
          ++evals;
        }
      }
    }
    return {best, true, evals};
  }

  std::vector<Vector> dirs;
  if (d == 3) {
    const int n = opts.grid_directions;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    dirs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      Vector u(3);
      u << r * std::cos(phi), r * std::sin(phi), z;
      dirs.push_back(u);
    }
  } else {
    Rng rng(opts.seed);
    std::normal_distribution<double> nd;
    for (int i = 0; i < opts.random_directions; ++i) {
      Vector u(d);
      for (int j = 0; j < d; ++j) u[j] = nd(rng);
      dirs.push_back(u.normalized());
    }
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) scored.emplace_back(gap_at(a, b, dirs[i], absolute), i);
  std::size_t evals = dirs.size();
  const auto top = std::min<std::size_t>(static_cast<std::size_t>(opts.ascent_candidates), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(top), scored.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });
  double best = scored.front().first;
  for (std::size_t c = 0; c < top; ++c) {
    Vector u = dirs[scored[c].second];
    double fu = scored[c].first;
    double step = 0.05;
    for (int it = 0; it < opts.ascent_steps; ++it) {
      Vector w = support_point(a, u) - support_point(b, u);
      if (absolute && support_unnormalized(a, u) - support_unnormalized(b, u) < 0.0) w = -w;
      Vector tangent = w - w.dot(u) * u;
      const double tn = tangent.norm();
      if (tn <= 1e-15) break;
      const Vector cand = (u + step * tangent / tn).normalized();
      const double fc = gap_at(a, b, cand, absolute);
      ++evals;
      if (fc > fu) {
        u = cand;
        fu = fc;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, fu);
  }
  return {best, false, evals};
}

// Andrew's monotone chain, counter-clockwise, collinear points dropped.
std::vector<Vector> hull2d(std::vector<Vector> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vector& p, const Vector& q) {
    return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vector& p, const Vector& q) { return same_point(p, q); }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Vector& o, const Vector& p, const Vector& q) {
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
  };
  std::vector<Vector> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

SetDistance deviation(const ConvexBody& a, const ConvexBody& b, const SearchOptions& opts) {
  require_dim(a.dim(), b.dim(), "deviation");
  if (auto verts = extreme_point_superset(a)) {
    double best = 0.0;
    for (const auto& v : *verts) best = std::max(best, project(v, b).distance);
    return {best, true, verts->size()};
  }
  const GapSup g = support_gap_sup(a, b, false, opts);
  return {std::max(0.0, g.value), g.exact, g.evaluations};
}

SetDistance hausdorff(const ConvexBody& a, const ConvexBody& b, const SearchOptions& opts) {
  const SetDistance ab = deviation(a, b, opts);
  const SetDistance ba = deviation(b, a, opts);
  return {std::max(ab.value, ba.value), ab.exact && ba.exact, ab.evaluations + ba.evaluations};
}

SetDistance hausdorff_support(const ConvexBody& a, const ConvexBody& b, const SearchOptions& opts) {
  const GapSup g = support_gap_sup(a, b, true, opts);
  return {std::max(0.0, g.value), g.exact, g.evaluations};
}

ConvexBody scaled(const ConvexBody& body, double alpha) {
  return std::visit(
      [&](const auto& s) -> ConvexBody {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return ConvexBody::point(alpha * s.p);
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          const double x = alpha * s.lo, y = alpha * s.hi;
          return ConvexBody::interval(std::min(x, y), std::max(x, y));
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          std::vector<Vector> pts;
          for (const auto& p : s.points) pts.push_back(alpha * p);
          return ConvexBody::vpolytope(std::move(pts));
        } else {
          std::vector<Vector> gens;
          for (const auto& g : s.generators) gens.push_back(std::abs(alpha) * g);
          return ConvexBody::zonotope(alpha * s.center, std::move(gens));
        }
      },
      body.repr());
}

namespace {

ConvexBody translated(const ConvexBody& body, const Vector& t) {
  return std::visit(
      [&](const auto& s) -> ConvexBody {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return ConvexBody::point(s.p + t);
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          return ConvexBody::interval(s.lo + t[0], s.hi + t[0]);
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          std::vector<Vector> pts;
          for (const auto& p : s.points) pts.push_back(p + t);
          return ConvexBody::vpolytope(std::move(pts));
        } else {
          return ConvexBody::zonotope(s.center + t, s.generators);
        }
      },
      body.repr());
}

std::optional<Zonotope> as_zonotope_repr(const ConvexBody& body) {
  if (const auto* z = body.as_zonotope()) return *z;
  if (const auto* i = body.as_interval()) {
    std::vector<Vector> gens;
    if (i->hi > i->lo) gens.push_back(scalar_vec(i->halfwidth()));
    return Zonotope{scalar_vec(i->mid()), std::move(gens)};
  }
  return std::nullopt;
}

std::optional<std::vector<Vector>> as_point_list(const ConvexBody& body) {
  if (const auto* v = body.as_vpolytope()) return v->points;
  if (const auto* i = body.as_interval()) return std::vector<Vector>{scalar_vec(i->lo), scalar_vec(i->hi)};
  return std::nullopt;
}

}  // namespace

ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b) {
  require_dim(a.dim(), b.dim(), "minkowski_sum");
  if (const auto* p = a.as_point()) return translated(b, p->p);
  if (const auto* p = b.as_point()) return translated(a, p->p);
  if (const auto* ia = a.as_interval()) {
    if (const auto* ib = b.as_interval()) return ConvexBody::interval(ia->lo + ib->lo, ia->hi + ib->hi);
  }
  const auto za = as_zonotope_repr(a);
  const auto zb = as_zonotope_repr(b);
  if (za && zb && (a.as_zonotope() || b.as_zonotope())) {
    std::vector<Vector> gens = za->generators;
    gens.insert(gens.end(), zb->generators.begin(), zb->generators.end());
    return ConvexBody::zonotope(za->center + zb->center, std::move(gens));
  }
  const auto pa = as_point_list(a);
  const auto pb = as_point_list(b);
  if (pa && pb) {
    std::vector<Vector> sums;
    sums.reserve(pa->size() * pb->size());
    for (const auto& x : *pa)
      for (const auto& y : *pb) sums.push_back(x + y);
    return ConvexBody::vpolytope(std::move(sums));
  }
  fail(ErrorCode::unsupported, "minkowski_sum: unsupported variant pair (V-polytope with zonotope)");
}

ConvexBody convex_hull(const std::vector<Vector>& points) {
  require(!points.empty(), ErrorCode::invalid_argument, "convex_hull: empty input");
  const auto d = points.front().size();
  require(d >= 1, ErrorCode::invalid_argument, "convex_hull: dimension must be >= 1");
  for (const auto& p : points) require_dim(p.size(), d, "convex_hull");
  ConvexBody deduped = ConvexBody::vpolytope(points);
  const auto& pts = deduped.as_vpolytope()->points;
  if (pts.size() == 1) return ConvexBody::point(pts.front());
  if (d == 1) {
    double lo = pts.front()[0], hi = lo;
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return ConvexBody::interval(lo, hi);
  }
  if (d == 2) return ConvexBody::vpolytope(hull2d(pts));
  if (d == 3) {
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.norm());
    std::vector<Vector> kept = pts;
    for (std::size_t i = 0; i < kept.size() && kept.size() > 1;) {
      std::vector<Vector> others;
      others.reserve(kept.size() - 1);
      for (std::size_t j = 0; j < kept.size(); ++j)
        if (j != i) others.push_back(kept[j]);
      const double dist = project(kept[i], ConvexBody::vpolytope(others), 1e-13 * std::max(1.0, scale)).distance;
      if (dist <= 1e-12 * std::max(1.0, scale)) kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
      else ++i;
    }
    return ConvexBody::vpolytope(std::move(kept));
  }
  return deduped;
}

}  // namespace subdiff
