#include "subdiff/landscape.hpp"
#include "subdiff/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

namespace subdiff {

double c_equation(double c) { return c / (1.0 + c * c) + std::atan(c) - 0.25 * std::numbers::pi; }

double solve_c_constant() {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (c_equation(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return std::abs(c_equation(lo)) <= std::abs(c_equation(hi)) ? lo : hi;
}

PopulationStationarySet population_stationary_set(const Vector& x_bar) {
  const double n = x_bar.norm();
  require(n > 0.0, ErrorCode::invalid_argument, "stationary set: x_bar must be nonzero");
  const double c = solve_c_constant();
  return {x_bar, c, c * n};
}

double dist_to_population_Z(const Vector& x, const Vector& x_bar) {
  require_dim(x.size(), x_bar.size(), "dist_to_population_Z");
  const double n = x_bar.norm();
  require(n > 0.0, ErrorCode::invalid_argument, "dist_to_population_Z: x_bar must be nonzero");
  static const double c = solve_c_constant();
  const double rho = c * n;
  const double alpha = x.dot(x_bar) / n;
  const double perp = (x - (alpha / n) * x_bar).norm();
  return std::min({x.norm(), (x - x_bar).norm(), (x + x_bar).norm(), std::hypot(alpha, perp - rho)});
}

double default_stationary_tol(const EmpiricalObjective& obj, const Vector& x_bar) {
  const double mean_sq = obj.data().features.colwise().squaredNorm().mean();
  return 1e-3 * x_bar.norm() * mean_sq;
}

double stationarity_residual(const EmpiricalObjective& obj, const Vector& x) {
  const ConvexBody z = obj.subdiff(x);
  return project(Vector::Zero(x.size()), z, 1e-13).distance;
}

namespace {

bool is_abs_loss(const ScalarConvexLoss& loss) {
  const auto& q = loss.quadratic_coeffs();
  return q && (*q)[1] == -1.0 && (*q)[2] == 0.0 && loss.kinks().size() == 1 && loss.kinks()[0].t == 0.0 &&
         loss.kinks()[0].a == 2.0;
}

struct PolishResult {
  Vector x;
  double residual;
};

void next_combination(std::vector<int>& idx, int n, bool& done) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) {
    done = true;
    return;
  }
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
}

// Newton solve of the stationarity system with a small set of samples held
// on their kink surface: the rest keep the sign they have at x.
PolishResult kkt_polish(const EmpiricalObjective& obj, const Vector& x, int candidates, double radius) {
  const Matrix& A = obj.data().features;
  const Vector& b = obj.data().b;
  const auto m = obj.m();
  const auto d = x.size();
  const double inv2m = 2.0 / static_cast<double>(m);

  PolishResult best{x, stationarity_residual(obj, x)};
  if (best.residual == 0.0) return best;

  const Vector t = A.transpose() * x;
  const Vector c = t.array().square().matrix() - b;
  const Vector s = (c.array() >= 0.0).select(Vector::Ones(m), -Vector::Ones(m));
  const Vector anorm = A.colwise().norm().transpose();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto kink_dist = [&](Eigen::Index i) { return std::abs(c[i]) / (2.0 * std::abs(t[i]) * anorm[i] + 1e-300); };
  const auto P = std::min<Eigen::Index>(m, candidates);
  std::partial_sort(order.begin(), order.begin() + P, order.end(),
                    [&](Eigen::Index p, Eigen::Index q) { return kink_dist(p) < kink_dist(q); });
  order.resize(static_cast<std::size_t>(P));

  const Matrix H = inv2m * (A * s.asDiagonal() * A.transpose());
  const double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());

  // Point where every candidate sample sits on its kink at once (the sharp
  // minimizers in the noiseless case); Gauss-Newton on the overdetermined
  // system t_i^2 = b_i.
  if (P > d) {
    Vector y = x;
    for (int it = 0; it < 40; ++it) {
      Vector F(P);
      Matrix J(P, d);
      for (Eigen::Index j = 0; j < P; ++j) {
        const auto col = order[static_cast<std::size_t>(j)];
        const double ty = A.col(col).dot(y);
        F[j] = ty * ty - b[col];
        J.row(j) = 2.0 * ty * A.col(col).transpose();
      }
      if (F.cwiseAbs().maxCoeff() <= 1e-13 * bscale) break;
      const Vector step = J.colPivHouseholderQr().solve(-F);
      if (!step.allFinite()) break;
      y += step;
    }
    // then every sample already on its kink at y, to clear rounding
    std::vector<Eigen::Index> on;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double ty = A.col(i).dot(y);
      if (std::abs(ty * ty - b[i]) <= 1e-8 * bscale) on.push_back(i);
    }
    if (static_cast<Eigen::Index>(on.size()) > d) {
      for (int it = 0; it < 5; ++it) {
        const auto n_on = static_cast<Eigen::Index>(on.size());
        Vector F(n_on);
        Matrix J(n_on, d);
        for (Eigen::Index j = 0; j < n_on; ++j) {
          const auto col = on[static_cast<std::size_t>(j)];
          const double ty = A.col(col).dot(y);
          F[j] = ty * ty - b[col];
          J.row(j) = 2.0 * ty * A.col(col).transpose();
        }
        const Vector step = J.colPivHouseholderQr().solve(-F);
        if (!step.allFinite()) break;
        y += step;
      }
    }
    if ((y - x).norm() <= radius) {
      const double r = stationarity_residual(obj, y);
      if (r < best.residual) best = {y, r};
      if (best.residual <= 1e-12) return best;
    }
  }

  for (Eigen::Index k = 1; k <= std::min<Eigen::Index>(d, P); ++k) {
    std::vector<int> comb(static_cast<std::size_t>(k));
    std::iota(comb.begin(), comb.end(), 0);
    for (bool done = false; !done; next_combination(comb, static_cast<int>(P), done)) {
      std::vector<Eigen::Index> I;
      for (int ci : comb) I.push_back(order[static_cast<std::size_t>(ci)]);
      Matrix Hm = H;
      for (auto j : I) Hm -= inv2m * s[j] * A.col(j) * A.col(j).transpose();
      Vector y = x, lam = Vector::Zero(k);
      bool ok = false;
      for (int it = 0; it < 40; ++it) {
        Vector F(d + k);
        Vector ty(k);
        for (Eigen::Index j = 0; j < k; ++j) ty[j] = A.col(I[static_cast<std::size_t>(j)]).dot(y);
        F.head(d) = Hm * y;
        for (Eigen::Index j = 0; j < k; ++j) {
          const auto col = I[static_cast<std::size_t>(j)];
          F.head(d) += inv2m * lam[j] * ty[j] * A.col(col);
          F[d + j] = ty[j] * ty[j] - b[col];
        }
        if (F.head(d).norm() <= 1e-15 * bscale && F.tail(k).cwiseAbs().maxCoeff() <= 1e-13 * bscale) {
          ok = true;
          break;
        }
        Matrix J = Matrix::Zero(d + k, d + k);
        J.topLeftCorner(d, d) = Hm;
        for (Eigen::Index j = 0; j < k; ++j) {
          const auto col = I[static_cast<std::size_t>(j)];
          J.topLeftCorner(d, d) += inv2m * lam[j] * A.col(col) * A.col(col).transpose();
          J.block(0, d + j, d, 1) = inv2m * ty[j] * A.col(col);
          J.block(d + j, 0, 1, d) = 2.0 * ty[j] * A.col(col).transpose();
        }
        const Vector step = J.fullPivLu().solve(-F);
        if (!step.allFinite()) break;
        y += step.head(d);
        lam += step.tail(k);
      }
      if (!ok || (lam.cwiseAbs().array() > 1.0).any() || (y - x).norm() > radius) continue;
      const Vector cy = (A.transpose() * y).array().square().matrix() - b;
      bool consistent = true;
      for (Eigen::Index i = 0; i < m && consistent; ++i) {
        if (std::find(I.begin(), I.end(), i) != I.end()) continue;
        consistent = std::abs(cy[i]) < kKinkTol || (cy[i] >= 0.0) == (s[i] > 0.0);
      }
      if (!consistent) continue;
      const double r = stationarity_residual(obj, y);
      if (r < best.residual) best = {y, r};
      if (best.residual <= 1e-12) return best;
    }
  }
  return best;
}

}  // namespace

std::vector<StationaryPointReport> find_stationary_points(const EmpiricalObjective& obj,
                                                          const std::vector<Vector>& starts,
                                                          const StationaryConfig& cfg) {
  require(!starts.empty(), ErrorCode::invalid_argument, "find_stationary_points: no starts");
  require(obj.model().kind() == ModelKind::phase_retrieval && is_abs_loss(obj.loss()), ErrorCode::unsupported,
          "find_stationary_points: requires phase retrieval with the abs loss");
  require_dim(cfg.x_bar.size(), obj.dim(), "find_stationary_points ground truth");
  const double xb_norm = cfg.x_bar.norm();
  require(xb_norm > 0.0, ErrorCode::invalid_argument, "find_stationary_points: x_bar must be nonzero");
  const double tol = cfg.tol >= 0.0 ? cfg.tol : default_stationary_tol(obj, cfg.x_bar);
  const double gamma0 = cfg.gamma0 > 0.0 ? cfg.gamma0 : 0.1 * xb_norm;
  const Vector u = cfg.x_bar / xb_norm;
  const int P = cfg.polish_candidates >= 0 ? cfg.polish_candidates : obj.dim() + 2;

  std::vector<StationaryPointReport> out(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t si) {
    StationaryPointReport rep;
    rep.start_index = static_cast<int>(si);
    Vector x = starts[si];
    require_dim(x.size(), obj.dim(), "stationary start");
    int iters = 0;
    auto reflect = [&](Vector g) {
      if (cfg.mode == StationaryMode::saddle) g -= 2.0 * g.dot(u) * u;
      return g;
    };
    if (stationarity_residual(obj, x) > tol) {
      for (int k = 1; k <= cfg.iterations; ++k, ++iters)
        x -= (gamma0 / std::sqrt(static_cast<double>(k))) * reflect(obj.G_S_batch(x));
      double gamma = gamma0 / std::sqrt(static_cast<double>(std::max(1, cfg.iterations)));
      Vector best = x;
      double best_norm = std::numeric_limits<double>::infinity();
      for (int k = 0; k < cfg.stagnation_iterations; ++k, ++iters) {
        const Vector g = obj.G_S_batch(x);
        const double gn = g.norm();
        if (gn < best_norm) {
          best_norm = gn;
          best = x;
        }
        gamma *= cfg.stagnation_decay;
        x -= gamma * reflect(g);
      }
      x = best;
      if (cfg.polish) x = kkt_polish(obj, x, P, cfg.polish_radius * xb_norm).x;
    }
    rep.x = x;
    rep.iterations = iters;
    rep.residual = stationarity_residual(obj, x);
    rep.success = rep.residual <= tol;
    rep.dist_to_Z = dist_to_population_Z(x, cfg.x_bar);
    out[si] = std::move(rep);
  });
  return out;
}

std::vector<Vector> cluster_terminals(const std::vector<StationaryPointReport>& reports, double merge_radius) {
  std::vector<Vector> reps;
  for (const auto& r : reports) {
    if (!r.success) continue;
    const bool merged = std::any_of(reps.begin(), reps.end(), [&](const Vector& p) {
      return (p - r.x).norm() <= merge_radius;
    });
    if (!merged) reps.push_back(r.x);
  }
  return reps;
}

double deviation_ZS_to_Z(const std::vector<StationaryPointReport>& reports, const Vector& x_bar, double merge_radius) {
  const auto reps = cluster_terminals(reports, merge_radius);
  require(!reps.empty(), ErrorCode::invalid_argument, "deviation_ZS_to_Z: no successful terminals");
  double best = 0.0;
  for (const auto& p : reps) best = std::max(best, dist_to_population_Z(p, x_bar));
  return best;
}

}  // namespace subdiff
