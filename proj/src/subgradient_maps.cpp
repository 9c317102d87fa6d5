#include "subdiff/subgradient_maps.hpp"
#include "subdiff/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace subdiff {

namespace {

constexpr Eigen::Index kSampleBlock = 4096;

// Selection g applied elementwise.
Matrix apply_selection(const ScalarConvexLoss& loss, const Matrix& C) {
  Matrix W(C.rows(), C.cols());
  if (const auto& q = loss.quadratic_coeffs()) {
    W.array() = (*q)[1] + 2.0 * (*q)[2] * C.array();
    for (const auto& k : loss.kinks()) W.array() += (C.array() >= k.t).cast<double>() * k.a;
  } else {
    for (Eigen::Index j = 0; j < C.cols(); ++j)
      for (Eigen::Index i = 0; i < C.rows(); ++i) W(i, j) = loss.selection_g(C(i, j));
  }
  return W;
}

struct BlockSums {
  Matrix sum;
  Matrix sq;
};

BlockSums block_moments(const CompositeModel& model, const ScalarConvexLoss& loss, const Dataset& data,
                        const Matrix& X, Eigen::Index lo, Eigen::Index n, bool want_second) {
  const auto F = data.features.middleCols(lo, n);
  const auto b = data.b.segment(lo, n);
  const Eigen::Index B = X.cols();
  BlockSums out;
  switch (model.kind()) {
    case ModelKind::phase_retrieval:
    case ModelKind::generic: {
      const bool pr = model.kind() == ModelKind::phase_retrieval;
      const Matrix S = F.transpose() * X;
      Matrix C = pr ? Matrix(S.array().square()) : S;
      C.colwise() -= b;
      Matrix W = apply_selection(loss, C);
      if (pr) W.array() *= 2.0 * S.array();
      out.sum = F * W;
      if (want_second) out.sq = F.array().square().matrix() * W.array().square().matrix();
      break;
    }
    case ModelKind::blind_deconv: {
      const int d1 = model.shape()[0], d2 = model.shape()[1];
      const auto U = F.topRows(d1);
      const auto V = F.bottomRows(d2);
      const Matrix P = U.transpose() * X.topRows(d1);
      const Matrix Q = V.transpose() * X.bottomRows(d2);
      Matrix C = P.cwiseProduct(Q);
      C.colwise() -= b;
      const Matrix W = apply_selection(loss, C);
      const Matrix WQ = W.cwiseProduct(Q), WP = W.cwiseProduct(P);
      out.sum.resize(d1 + d2, B);
      out.sum.topRows(d1) = U * WQ;
      out.sum.bottomRows(d2) = V * WP;
      if (want_second) {
        out.sq.resize(d1 + d2, B);
        out.sq.topRows(d1) = U.array().square().matrix() * WQ.array().square().matrix();
        out.sq.bottomRows(d2) = V.array().square().matrix() * WP.array().square().matrix();
      }
      break;
    }
    case ModelKind::matrix_sensing: {
      const int D = model.shape()[0], r = model.shape()[1];
      Matrix Z(D * D, B);
      for (Eigen::Index j = 0; j < B; ++j) {
        const Eigen::Map<const Matrix> Xj(X.col(j).data(), D, r);
        const Matrix XXt = Xj * Xj.transpose();
        Z.col(j) = Eigen::Map<const Vector>(XXt.data(), D * D);
      }
      Matrix C = F.transpose() * Z;
      C.colwise() -= b;
      const Matrix W = apply_selection(loss, C);
      const Matrix Magg = F * W;
      out.sum.resize(D * r, B);
      for (Eigen::Index j = 0; j < B; ++j) {
        const Eigen::Map<const Matrix> M(Magg.col(j).data(), D, D);
        const Eigen::Map<const Matrix> Xj(X.col(j).data(), D, r);
        const Matrix G = (M + M.transpose()) * Xj;
        out.sum.col(j) = Eigen::Map<const Vector>(G.data(), D * r);
      }
      if (want_second) {
        // vec((A + A^T) X) = K vec(A), so all per-sample gradients are K F.
        out.sq.resize(D * r, B);
        const Matrix W2 = W.array().square().matrix();
        for (Eigen::Index j = 0; j < B; ++j) {
          const Eigen::Map<const Matrix> Xj(X.col(j).data(), D, r);
          Matrix K = Matrix::Zero(D * r, D * D);
          for (int k = 0; k < r; ++k)
            for (int p = 0; p < D; ++p)
              for (int q = 0; q < D; ++q) {
                K(p + k * D, p + q * D) += Xj(q, k);
                K(q + k * D, p + q * D) += Xj(p, k);
              }
          const Matrix Gall = K * F;
          out.sq.col(j) = Gall.array().square().matrix() * W2.col(j);
        }
      }
      break;
    }
  }
  return out;
}

Interval1D kink_aware_interval(const ScalarConvexLoss& loss, double c, double tol) {
  const int j = loss.kink_index(c, tol);
  if (j < 0) return loss.subdiff_interval(c);
  double lo = loss.g_sm(c);
  for (int k = 0; k < j; ++k) lo += loss.kinks()[static_cast<std::size_t>(k)].a;
  return {lo, lo + loss.kinks()[static_cast<std::size_t>(j)].a};
}

ConvexBody empirical_zonotope(const CompositeModel& model, const ScalarConvexLoss& loss, const Dataset& data,
                              const Vector& x, double tol) {
  require_dim(x.size(), model.dim(), "subdiff");
  const double inv_m = 1.0 / static_cast<double>(data.size());
  Vector center = Vector::Zero(model.dim());
  std::vector<Vector> gens;
  Vector grad;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double c = model.c_value(x, data.feat(i), data.b[i]);
    model.c_grad(x, data.feat(i), grad);
    const Interval1D iv = kink_aware_interval(loss, c, tol);
    center += iv.mid() * grad;
    if (iv.hi > iv.lo) gens.push_back((inv_m * iv.halfwidth()) * grad);
  }
  return ConvexBody::zonotope(inv_m * center, std::move(gens));
}

}  // namespace

BatchMoments selection_moments(const CompositeModel& model, const ScalarConvexLoss& loss, const Dataset& data,
                               const Matrix& X, bool want_second, int threads) {
  require_dim(X.rows(), model.dim(), "selection_moments");
  require(data.size() >= 1, ErrorCode::invalid_argument, "selection_moments: empty dataset");
  require_dim(data.features.rows(), model.feature_dim(), "selection_moments features");
  const Eigen::Index m = data.size();
  const Eigen::Index blocks = (m + kSampleBlock - 1) / kSampleBlock;
  std::vector<BlockSums> parts(static_cast<std::size_t>(blocks));
  parallel_for(parts.size(), threads, [&](std::size_t k) {
    const Eigen::Index lo = static_cast<Eigen::Index>(k) * kSampleBlock;
    parts[k] = block_moments(model, loss, data, X, lo, std::min(kSampleBlock, m - lo), want_second);
  });
  BatchMoments out;
  out.mean = Matrix::Zero(model.dim(), X.cols());
  if (want_second) out.second = Matrix::Zero(model.dim(), X.cols());
  for (const auto& p : parts) {
    out.mean += p.sum;
    if (want_second) out.second += p.sq;
  }
  const double inv = 1.0 / static_cast<double>(m);
  out.mean *= inv;
  if (want_second) out.second *= inv;
  return out;
}

EmpiricalObjective::EmpiricalObjective(CompositeModel model, ScalarConvexLoss loss, Dataset data)
    : model_(std::move(model)), loss_(std::move(loss)), data_(std::move(data)) {
  require(data_.size() >= 1, ErrorCode::invalid_argument, "objective: dataset must be nonempty");
  require(data_.kind == model_.kind() && data_.shape == model_.shape(), ErrorCode::dimension_mismatch,
          "objective: dataset does not match model");
  require_dim(data_.features.rows(), model_.feature_dim(), "objective features");
}

double EmpiricalObjective::value(const Vector& x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m(); ++i) s += loss_.eval(model_.c_value(x, data_.feat(i), data_.b[i]));
  return s / static_cast<double>(m());
}

Vector EmpiricalObjective::G_S(const Vector& x) const {
  require_dim(x.size(), dim(), "G_S");
  Vector acc = Vector::Zero(dim());
  Vector grad;
  for (Eigen::Index i = 0; i < m(); ++i) {
    const double c = model_.c_value(x, data_.feat(i), data_.b[i]);
    model_.c_grad(x, data_.feat(i), grad);
    acc += loss_.selection_g(c) * grad;
  }
  return acc / static_cast<double>(m());
}

Matrix EmpiricalObjective::G_S_batch(const Matrix& X, int threads) const {
  return selection_moments(model_, loss_, data_, X, false, threads).mean;
}

ConvexBody EmpiricalObjective::subdiff(const Vector& x, double kink_tol) const {
  return empirical_zonotope(model_, loss_, data_, x, kink_tol);
}

ConvexBody PopulationOracle::subdiff(const Vector& x) const {
  if (strategy_ == Strategy::mega_sample) return empirical_zonotope(*model_, *loss_, *data_, x, kKinkTol);
  return ConvexBody::point(G(x).value);
}

GapRecord pointwise_gap(const EmpiricalObjective& obj, const PopulationOracle& oracle, const Vector& x) {
  require_dim(oracle.dim(), obj.dim(), "pointwise_gap");
  GapRecord rec;
  rec.x = x;
  const PopEstimate pop = oracle.G(x);
  rec.gap_selection = (obj.G_S(x) - pop.value).norm();
  rec.oracle_err = pop.error_bound;
  const SetDistance h = hausdorff(obj.subdiff(x), oracle.subdiff(x));
  rec.gap_hausdorff = h.value;
  rec.hausdorff_exact = h.exact;
  rec.hausdorff_flagged = true;
  return rec;
}

Matrix ball_probes(const Vector& x0, double r, int count, std::uint64_t seed) {
  require(r > 0.0, ErrorCode::invalid_argument, "ball probes: radius must be > 0");
  require(count >= 1, ErrorCode::invalid_argument, "ball probes: budget must be >= 1");
  const auto d = x0.size();
  Matrix P(d, count);
  P.col(0) = x0;
  for (int i = 1; i < count; ++i) {
    Rng rng(derive_seed(seed, 0xba11, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    Vector u(d);
    double n2 = 0.0;
    do {
      for (Eigen::Index j = 0; j < d; ++j) u[j] = nd(rng);
      n2 = u.squaredNorm();
    } while (n2 == 0.0);
    const double rad = r * std::pow(ud(rng), 1.0 / static_cast<double>(d));
    P.col(i) = x0 + (rad / std::sqrt(n2)) * u;
  }
  return P;
}

ProbeSet make_probe_set(const PopulationOracle& oracle, const Vector& x0, double r, int budget, std::uint64_t seed,
                        int threads) {
  require_dim(x0.size(), oracle.dim(), "probe set");
  ProbeSet ps;
  ps.x0 = x0;
  ps.r = r;
  ps.seed = seed;
  ps.points = ball_probes(x0, r, budget, seed);
  ps.pop = oracle.G_batch(ps.points, &ps.pop_err, threads);
  return ps;
}

SupGapResult sup_gap_over_ball(const EmpiricalObjective& obj, const PopulationOracle& oracle, const ProbeSet& probes,
                               const SupGapOptions& opts) {
  require(probes.points.cols() >= 1, ErrorCode::invalid_argument, "sup_gap: empty probe set");
  require_dim(probes.points.rows(), obj.dim(), "sup_gap");
  const auto N = static_cast<int>(probes.points.cols());
  const int d = obj.dim();
  const Matrix gs = obj.G_S_batch(probes.points, opts.threads);
  std::vector<double> gap(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) gap[static_cast<std::size_t>(i)] = (gs.col(i) - probes.pop.col(i)).norm();

  SupGapResult res;
  res.evaluations = static_cast<std::size_t>(N);
  auto consider = [&](double v, const Vector& x, double err) {
    if (v > res.value || res.argmax.size() == 0) {
      res.value = v;
      res.argmax = x;
      res.oracle_err = err;
    }
  };
  for (int i = 0; i < N; ++i)
    consider(gap[static_cast<std::size_t>(i)], probes.points.col(i), probes.pop_err[static_cast<std::size_t>(i)]);

  if (opts.refine_starts <= 0 || opts.refine_steps <= 0) return res;

  // Starts: top probes within each halving prefix, so a smaller budget's
  // starts are a subset of a larger one's.
  std::set<int> starts;
  for (int n = N;; n /= 2) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    const int k = std::min(n, opts.refine_starts);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
      const double ga = gap[static_cast<std::size_t>(a)], gb = gap[static_cast<std::size_t>(b)];
      return ga > gb || (ga == gb && a < b);
    });
    starts.insert(idx.begin(), idx.begin() + k);
    if (n <= opts.refine_starts) break;
  }

  struct Climber {
    Vector x;
    double f;
    double step;
    int fails;
    Rng rng;
  };
  std::vector<Climber> cl;
  for (int s : starts)
    cl.push_back({probes.points.col(s), gap[static_cast<std::size_t>(s)], probes.r / 4.0, 0,
                  Rng(derive_seed(probes.seed, 0x411c, static_cast<std::uint64_t>(s)))});

  const auto S = static_cast<Eigen::Index>(cl.size());
  Matrix cand(d, S);
  bool refined = false;
  for (int step = 0; step < opts.refine_steps; ++step) {
    for (Eigen::Index s = 0; s < S; ++s) {
      auto& c = cl[static_cast<std::size_t>(s)];
      std::uniform_int_distribution<int> coord(0, d - 1);
      const int j = coord(c.rng);
      const double sign = std::bernoulli_distribution(0.5)(c.rng) ? 1.0 : -1.0;
      Vector y = c.x;
      y[j] += sign * c.step;
      const Vector off = y - probes.x0;
      const double n = off.norm();
      if (n > probes.r) y = probes.x0 + (probes.r / n) * off;
      cand.col(s) = y;
    }
    const Matrix g_emp = obj.G_S_batch(cand, opts.threads);
    const Matrix g_pop = oracle.G_batch(cand, nullptr, opts.threads);
    res.evaluations += static_cast<std::size_t>(S);
    for (Eigen::Index s = 0; s < S; ++s) {
      auto& c = cl[static_cast<std::size_t>(s)];
      const double v = (g_emp.col(s) - g_pop.col(s)).norm();
      if (v > c.f) {
        c.x = cand.col(s);
        c.f = v;
        c.fails = 0;
        if (v > res.value) refined = true;
        consider(v, c.x, 0.0);
      } else if (++c.fails >= 2 * d) {
        c.step *= 0.5;
        c.fails = 0;
      }
    }
  }
  // error bound only for the final maximizer
  if (refined) res.oracle_err = oracle.G(res.argmax).error_bound;
  return res;
}

SupGapResult sup_gap_over_ball(const EmpiricalObjective& obj, const PopulationOracle& oracle, const Vector& x0,
                               double r, int budget, std::uint64_t seed, const SupGapOptions& opts) {
  const ProbeSet ps = make_probe_set(oracle, x0, r, budget, seed, opts.threads);
  return sup_gap_over_ball(obj, oracle, ps, opts);
}

}  // namespace subdiff
