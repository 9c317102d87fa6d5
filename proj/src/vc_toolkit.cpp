#include "subdiff/vc_toolkit.hpp"
#include "subdiff/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace subdiff {

ThresholdFamily ThresholdFamily::from_model(const CompositeModel& model) {
  ThresholdFamily f;
  f.name = model.name();
  f.param_dim = model.dim();
  f.degree = model.degree();
  f.point_dim = model.feature_dim() + 1;
  const int F = model.feature_dim();
  f.c = [model, F](const Vector& x, const double* xi) { return model.c_value(x, xi, xi[F]); };
  f.sample_point = [F](Rng& rng, double* xi) {
    std::normal_distribution<double> nd;
    for (int i = 0; i <= F; ++i) xi[i] = nd(rng);
  };
  return f;
}

ThresholdFamily ThresholdFamily::constant() {
  ThresholdFamily f;
  f.name = "constant";
  f.param_dim = 1;
  f.degree = 1;
  f.point_dim = 1;
  f.c = [](const Vector&, const double* xi) { return xi[0]; };
  f.sample_point = [](Rng& rng, double* xi) { xi[0] = std::normal_distribution<double>()(rng); };
  return f;
}

namespace {

std::uint32_t labeling_of(const ThresholdFamily& fam, const Matrix& pts, const Vector& x, double t) {
  std::uint32_t mask = 0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    if (fam.c(x, pts.col(i).data()) >= t) mask |= 1u << i;
  return mask;
}

Vector random_param(Rng& rng, int d) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const double R = std::pow(10.0, ud(rng));
  Vector x(d);
  for (int j = 0; j < d; ++j) x[j] = R * nd(rng);
  return x;
}

// Separation margin of a labeling: max over zeros minus min over ones;
// negative means a threshold exists.
double margin(const ThresholdFamily& fam, const Matrix& pts, std::uint32_t mask, const Vector& x, double* t_out) {
  double max0 = -std::numeric_limits<double>::infinity(), min1 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const double v = fam.c(x, pts.col(i).data());
    if (mask >> i & 1u) min1 = std::min(min1, v);
    else max0 = std::max(max0, v);
  }
  if (t_out) *t_out = 0.5 * (max0 + min1);
  return max0 - min1;
}

template <class F>
Vector nelder_mead(const F& f, Vector x0, double scale, int iters, double stop_below) {
  const auto n = x0.size();
  std::vector<Vector> s(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> fv(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i + 1)][i] += scale;
  for (std::size_t i = 0; i < s.size(); ++i) fv[i] = f(s[i]);
  std::vector<std::size_t> ord(s.size());
  for (int it = 0; it < iters; ++it) {
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    if (fv[ord[0]] < stop_below) break;
    const std::size_t worst = ord.back(), second = ord[ord.size() - 2];
    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i + 1 < ord.size(); ++i) centroid += s[ord[i]];
    centroid /= static_cast<double>(n);
    const Vector xr = centroid + (centroid - s[worst]);
    const double fr = f(xr);
    if (fr < fv[ord[0]]) {
      const Vector xe = centroid + 2.0 * (centroid - s[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        s[worst] = xe;
        fv[worst] = fe;
      } else {
        s[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      s[worst] = xr;
      fv[worst] = fr;
    } else {
      const Vector xc = centroid + 0.5 * (s[worst] - centroid);
      const double fc = f(xc);
      if (fc < fv[worst]) {
        s[worst] = xc;
        fv[worst] = fc;
      } else {
        const Vector best = s[ord[0]];
        for (std::size_t i = 1; i < ord.size(); ++i) {
          s[ord[i]] = best + 0.5 * (s[ord[i]] - best);
          fv[ord[i]] = f(s[ord[i]]);
        }
      }
    }
  }
  std::size_t b = 0;
  for (std::size_t i = 1; i < fv.size(); ++i)
    if (fv[i] < fv[b]) b = i;
  return s[b];
}

}  // namespace

bool ShatterCertificate::shattered() const {
  return !witness.empty() && std::all_of(witness.begin(), witness.end(), [](const auto& w) { return w.found; });
}

std::size_t ShatterCertificate::realized() const {
  return static_cast<std::size_t>(
      std::count_if(witness.begin(), witness.end(), [](const auto& w) { return w.found; }));
}

bool ShatterCertificate::reverify(const ThresholdFamily& family) const {
  for (std::size_t mask = 0; mask < witness.size(); ++mask) {
    const auto& w = witness[mask];
    if (w.found && labeling_of(family, points, w.x, w.t) != mask) return false;
  }
  return true;
}

std::string ShatterCertificate::to_json() const {
  nlohmann::json j;
  j["N"] = N;
  j["seed"] = seed;
  j["budget"] = budget_used;
  j["shattered"] = shattered();
  j["points"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    j["points"].push_back(std::vector<double>(points.col(i).data(), points.col(i).data() + points.rows()));
  j["labelings"] = nlohmann::json::array();
  for (std::size_t mask = 0; mask < witness.size(); ++mask) {
    const auto& w = witness[mask];
    nlohmann::json e{{"mask", mask}, {"found", w.found}};
    if (w.found) {
      e["x"] = std::vector<double>(w.x.data(), w.x.data() + w.x.size());
      e["t"] = w.t;
    }
    j["labelings"].push_back(std::move(e));
  }
  return j.dump();
}

ShatterCertificate check_shatter(const ThresholdFamily& family, const Matrix& points, std::uint64_t seed,
                                 const ShatterOptions& opts) {
  const auto N = static_cast<int>(points.cols());
  require(N >= 1, ErrorCode::invalid_argument, "check_shatter: need at least one point");
  require(N <= kMaxShatterPoints, ErrorCode::invalid_argument,
          "check_shatter: N = " + std::to_string(N) + " exceeds the enumeration limit of 16");
  require_dim(points.rows(), family.point_dim, "check_shatter points");
  require(opts.budget >= 1, ErrorCode::invalid_argument, "check_shatter: budget must be >= 1");

  ShatterCertificate cert;
  cert.N = N;
  cert.points = points;
  cert.seed = seed;
  const std::size_t L = std::size_t{1} << N;
  cert.witness.resize(L);
  std::size_t missing = L;

  auto record = [&](std::uint32_t mask, const Vector& x, double t) {
    auto& w = cert.witness[mask];
    if (w.found) return;
    if (labeling_of(family, points, x, t) != mask) return;
    w = {true, x, t};
    --missing;
  };

  Rng rng(derive_seed(seed, 0x5a77e7));
  std::vector<double> v(static_cast<std::size_t>(N));
  std::vector<int> idx(static_cast<std::size_t>(N));
  int draws = 0;
  for (; draws < opts.budget && missing > 0; ++draws) {
    const Vector x = random_param(rng, family.param_dim);
    for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] = family.c(x, points.col(i).data());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[static_cast<std::size_t>(a)] > v[static_cast<std::size_t>(b)]; });
    std::uint32_t mask = 0;
    const double vmax = v[static_cast<std::size_t>(idx.front())], vmin = v[static_cast<std::size_t>(idx.back())];
    record(0, x, vmax + 1.0 + std::abs(vmax));
    for (int j = 1; j <= N; ++j) {
      mask |= 1u << idx[static_cast<std::size_t>(j - 1)];
      double t;
      if (j == N) {
        t = vmin - 1.0 - std::abs(vmin);
      } else {
        const double hi = v[static_cast<std::size_t>(idx[static_cast<std::size_t>(j - 1)])];
        const double lo = v[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        if (!(hi > lo)) continue;
        t = 0.5 * (hi + lo);
      }
      record(mask, x, t);
    }
  }
  cert.budget_used = static_cast<std::size_t>(draws);

  if (missing > 0 && opts.refine_iterations > 0) {
    std::vector<std::uint32_t> todo;
    for (std::size_t mask = 0; mask < L; ++mask)
      if (!cert.witness[mask].found) todo.push_back(static_cast<std::uint32_t>(mask));
    std::vector<ShatterWitness> found(todo.size());
    parallel_for(todo.size(), opts.threads, [&](std::size_t k) {
      const std::uint32_t mask = todo[k];
      Rng r(derive_seed(seed, 0x4e4d, mask));
      auto f = [&](const Vector& x) { return margin(family, points, mask, x, nullptr); };
      for (int start = 0; start < 3; ++start) {
        const Vector x0 = random_param(r, family.param_dim);
        const Vector x = nelder_mead(f, x0, std::max(0.1, x0.norm()), opts.refine_iterations, -1e-9);
        double t = 0.0;
        if (margin(family, points, mask, x, &t) < 0.0 && labeling_of(family, points, x, t) == mask) {
          found[k] = {true, x, t};
          return;
        }
      }
    });
    for (std::size_t k = 0; k < todo.size(); ++k)
      if (found[k].found) cert.witness[todo[k]] = found[k];
    cert.budget_used += todo.size() * static_cast<std::size_t>(3 * opts.refine_iterations);
  }
  return cert;
}

int vc_lower_bound(const ThresholdFamily& family, int n_max, std::uint64_t seed, const ShatterOptions& opts,
                   int configs, std::vector<ShatterCertificate>* certs) {
  require(n_max >= 1 && n_max <= kMaxShatterPoints, ErrorCode::invalid_argument,
          "vc_lower_bound: N_max must lie in [1, 16]");
  int best = 0;
  for (int N = 1; N <= n_max; ++N) {
    bool ok = false;
    for (int cfg = 0; cfg < configs && !ok; ++cfg) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(cfg)));
      Matrix pts(family.point_dim, N);
      for (int i = 0; i < N; ++i) family.sample_point(rng, pts.col(i).data());
      ShatterCertificate cert = check_shatter(family, pts, derive_seed(seed, 0xce47, static_cast<std::uint64_t>(N * 64 + cfg)), opts);
      ok = cert.shattered() && cert.reverify(family);
      if (certs) certs->push_back(std::move(cert));
    }
    if (!ok) break;
    best = N;
  }
  return best;
}

double sign_pattern_bound(int N, int d, int K) {
  return std::pow(50.0 * K * N / d, static_cast<double>(d));
}

SignPatternCount count_sign_patterns(const std::vector<Polynomial>& polys, int d, int K, int budget,
                                     std::uint64_t seed) {
  require(!polys.empty(), ErrorCode::invalid_argument, "count_sign_patterns: need N >= 1 polynomials");
  require(budget >= 1, ErrorCode::invalid_argument, "count_sign_patterns: budget must be >= 1");
  require(d >= 1 && K >= 1, ErrorCode::invalid_argument, "count_sign_patterns: d, K must be >= 1");
  std::set<std::vector<signed char>> seen;
  std::vector<signed char> pat(polys.size());
  SignPatternCount out;
  auto visit = [&](const Vector& x) {
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const double v = polys[i](x);
      pat[i] = static_cast<signed char>(v > 0.0 ? 1 : (v < 0.0 ? -1 : 0));
    }
    seen.insert(pat);
    ++out.evaluations;
  };
  Rng rng(derive_seed(seed, 0x516e));
  for (int k = 0; k < budget; ++k) visit(random_param(rng, d));
  if (d <= 3) {
    std::vector<double> vals{0.0};
    for (int e = -4; e <= 4; ++e) {
      vals.push_back(std::ldexp(1.0, e));
      vals.push_back(-std::ldexp(1.0, e));
    }
    std::vector<std::size_t> ix(static_cast<std::size_t>(d), 0);
    Vector x(d);
    for (;;) {
      for (int j = 0; j < d; ++j) x[j] = vals[ix[static_cast<std::size_t>(j)]];
      visit(x);
      int j = 0;
      while (j < d && ++ix[static_cast<std::size_t>(j)] == vals.size()) ix[static_cast<std::size_t>(j++)] = 0;
      if (j == d) break;
    }
  }
  out.count = seen.size();
  out.bound = sign_pattern_bound(static_cast<int>(polys.size()), d, K);
  out.within_bound = static_cast<double>(out.count) <= out.bound;
  return out;
}

int vc_upper_bound_poly(int d, int K) {
  require(d >= 1 && K >= 1, ErrorCode::invalid_argument, "vc_upper_bound_poly: d, K must be >= 1");
  const double e = d + 1.0;
  for (int N = 1;; ++N) {
    if (e * std::log(50.0 * K * N / e) < N * std::log(2.0)) return N;
    require(N < 1000000, ErrorCode::internal, "vc_upper_bound_poly: scan did not terminate");
  }
}

double delta_rate(int d, double vc, double m, double delta) {
  require(d >= 0 && vc >= 0.0, ErrorCode::invalid_argument, "delta_rate: d, vc must be >= 0");
  require(m >= 1.0, ErrorCode::invalid_argument, "delta_rate: m must be >= 1");
  require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument, "delta_rate: delta must lie in (0,1)");
  return std::sqrt((d + vc * std::log(m) + std::log(1.0 / delta)) / m);
}

}  // namespace subdiff
