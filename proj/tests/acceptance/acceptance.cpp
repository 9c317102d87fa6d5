// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
//
//   acceptance [--threads N] [--only 1,4,...] [--full-determinism] [--out DIR]

#include "../support/oracles.hpp"

#include "subdiff/analytic_1d.hpp"
#include "subdiff/experiments.hpp"
#include "subdiff/landscape.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/subgradient_maps.hpp"
#include "subdiff/vc_toolkit.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

using namespace subdiff;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_threads = 1;
fs::path g_out;
bool g_full_det = false;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Vector gauss(Rng& rng, int d, double s = 1.0) {
  std::normal_distribution<double> nd(0.0, s);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = nd(rng);
  return v;
}

ExperimentConfig config(const std::string& name) { return load_config(std::string(SUBDIFF_CONFIG_DIR) + "/" + name); }

ExperimentResult run_and_save(const ExperimentConfig& cfg, const std::string& tag, int threads) {
  ExperimentResult res = run_experiment(cfg, threads);
  write_outputs(res, cfg, (g_out / tag).string());
  return res;
}

// ---------------------------------------------------------------------------

Outcome c1_remark_a() {
  const auto f1 = PiecewiseLinearConvexFn::abs_sum({{1.0, 0.0}});
  const auto f2 = PiecewiseLinearConvexFn::abs_sum({{2.0, 0.0}});
  const double h0 = interval_hausdorff(f1.exact_subdiff(0.0), f2.exact_subdiff(0.0));
  const SelectionRule zero = [](const PiecewiseLinearConvexFn& f, double x) {
    return x == 0.0 ? 0.0 : f.right_derivative(x);
  };
  const double sel0 = selection_diff_on_points(f1, f2, {0.0}, zero, zero);
  double worst = -1e300;
  for (double eps : {1.0, 0.5, 0.1, 1e-3, 1e-6, 1e-10}) {
    const double lhs = d1_metric(f1, f2, -eps, eps);
    worst = std::max(worst, lhs - selection_sup_diff(f1, f2, -eps, eps));
    worst = std::max(worst, lhs - selection_sup_diff(f1, f2, -eps, eps, zero, zero));
  }
  const bool ok = std::abs(h0 - 1.0) <= 1e-12 && sel0 <= 1e-12 && worst <= 1e-12;
  return {ok, "H(0)=" + num(h0) + " sel_gap{0}=" + num(sel0) + " open_interval_excess=" + num(worst)};
}

Outcome c2_remark_b() {
  double e1 = 0.0, e2 = 0.0;
  for (int n = 1; n <= 100; ++n) {
    const auto f = remark_b_f1(n), g = remark_b_f2(n);
    e1 = std::max(e1, std::abs(d1_metric(f, g, -2.0, 2.0) - 1.0));
    e2 = std::max(e2, std::abs(d2_graph_metric(f, g, -2.0, 2.0) - 1.0 / n));
  }
  std::vector<double> excess(1000);
  parallel_for(excess.size(), g_threads, [&](std::size_t i) {
    Rng rng(derive_seed(0xacc2, i));
    const auto p = random_pl_convex(rng, -1.0, 1.0, 6), q = random_pl_convex(rng, -1.0, 1.0, 6);
    excess[i] = d2_graph_metric(p, q, -1.0, 1.0) - d1_metric(p, q, -1.0, 1.0);
  });
  const double ex = *std::max_element(excess.begin(), excess.end());
  return {e1 <= 1e-12 && e2 <= 1e-12 && ex <= 1e-12,
          "max|d1-1|=" + num(e1) + " max|d2-1/n|=" + num(e2) + " max(d2-d1)=" + num(ex) + " over 1000 pairs"};
}

Outcome c3_theorem1() {
  const std::size_t N = 1000;
  std::vector<double> rd(N), rs(N);
  parallel_for(N, g_threads, [&](std::size_t i) {
    Rng rng(derive_seed(0xacc3, i));
    const auto p = random_pl_convex(rng, -1.0, 1.0, 6), q = random_pl_convex(rng, -1.0, 1.0, 6);
    const double d1 = d1_metric(p, q, -1.0, 1.0);
    rd[i] = d1 - selection_sup_diff(p, q, -1.0, 1.0);
    double w = -1e300;
    for (int r = 0; r < 10; ++r) {
      const auto g1 = random_selection_rule(derive_seed(0xacc3, i, 2 * r));
      const auto g2 = random_selection_rule(derive_seed(0xacc3, i, 2 * r + 1));
      w = std::max(w, d1 - selection_sup_diff(p, q, -1.0, 1.0, g1, g2));
    }
    rs[i] = w;
  });
  const double a = *std::max_element(rd.begin(), rd.end()), b = *std::max_element(rs.begin(), rs.end());
  return {a <= 1e-12 && b <= 1e-12,
          "max excess right-derivative=" + num(a) + " random selections=" + num(b) + " over 1000 pairs x 10 rules"};
}

ConvexBody random_body(Rng& rng, int d) {
  std::uniform_int_distribution<int> k(1, 8);
  if (rng() % 2) {
    std::vector<Vector> g;
    const int n = k(rng);
    for (int i = 0; i < n; ++i) g.push_back(gauss(rng, d, 0.5));
    return ConvexBody::zonotope(gauss(rng, d, 0.5), g);
  }
  std::vector<Vector> p;
  const int n = k(rng);
  for (int i = 0; i < n; ++i) p.push_back(gauss(rng, d));
  return ConvexBody::vpolytope(p);
}

ConvexBody random_zonotope(Rng& rng, int d, int k) {
  std::vector<Vector> g;
  for (int i = 0; i < k; ++i) g.push_back(gauss(rng, d, 0.5));
  return ConvexBody::zonotope(gauss(rng, d, 0.5), g);
}

Outcome c4_set_calculus() {
  std::vector<double> err(200);
  parallel_for(err.size(), g_threads, [&](std::size_t i) {
    Rng rng(derive_seed(0xacc4, i));
    const int d = 1 + static_cast<int>(i % 3);
    const ConvexBody A = random_body(rng, d), B = random_body(rng, d);
    err[i] = std::max({std::abs(subdiff::deviation(A, B).value - oracle::deviation(A, B)),
                       std::abs(subdiff::deviation(B, A).value - oracle::deviation(B, A)),
                       std::abs(subdiff::hausdorff(A, B).value - oracle::hausdorff(A, B))});
  });
  std::vector<double> hull(1000), mink(1000);
  parallel_for(hull.size(), g_threads, [&](std::size_t i) {
    Rng rng(derive_seed(0xacc5, i));
    const int d = 1 + static_cast<int>(i % 3);
    const int n = 2 + static_cast<int>(i % 5);
    std::vector<Vector> P, Q;
    for (int j = 0; j < n; ++j) {
      P.push_back(gauss(rng, d));
      Q.push_back(gauss(rng, d));
    }
    double cloud = 0.0;
    for (const auto* S : {&P, &Q}) {
      const auto& T = S == &P ? Q : P;
      for (const auto& p : *S) {
        double b = 1e300;
        for (const auto& q : T) b = std::min(b, (p - q).norm());
        cloud = std::max(cloud, b);
      }
    }
    hull[i] = subdiff::hausdorff(convex_hull(P), convex_hull(Q)).value - cloud;
    const ConvexBody A1 = random_zonotope(rng, d, 3), A2 = random_zonotope(rng, d, 3), A3 = random_zonotope(rng, d, 3);
    mink[i] = subdiff::hausdorff(minkowski_sum(A1, A3), minkowski_sum(A2, A3)).value -
              subdiff::hausdorff(A1, A2).value;
  });
  const double e = *std::max_element(err.begin(), err.end());
  const double h = *std::max_element(hull.begin(), hull.end()), m = *std::max_element(mink.begin(), mink.end());
  return {e <= 1e-6 && h <= 1e-9 && m <= 1e-9,
          "max oracle error=" + num(e) + " (200 pairs) hull excess=" + num(h) + " minkowski excess=" + num(m) +
              " (1000 instances)"};
}

Outcome c5_subgradient() {
  const std::vector<CompositeModel> models = {CompositeModel::phase_retrieval(5), CompositeModel::matrix_sensing(3, 2),
                                              CompositeModel::blind_deconv(3, 3)};
  double worst_mem = 0.0, worst_fd = 0.0;
  int probes = 0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& model = models[k];
    Rng rng(derive_seed(0xacc6, k));
    Vector xb = gauss(rng, model.dim());
    xb.normalize();
    const EmpiricalObjective obj(model, ScalarConvexLoss::abs_loss(),
                                 draw_dataset(model, DistributionSpec::gaussian(1.0), xb, 128, 17 + k));
    const int count = k == 0 ? 334 : 333;
    std::vector<Vector> xs = {xb, Vector::Zero(model.dim())};
    while (static_cast<int>(xs.size()) < count) xs.push_back(gauss(rng, model.dim()));
    std::vector<double> mem(xs.size()), fd(xs.size());
    parallel_for(xs.size(), g_threads, [&](std::size_t i) {
      mem[i] = project(obj.G_S(xs[i]), obj.subdiff(xs[i]), 1e-13).distance;
      const double* feat = obj.data().feat(static_cast<Eigen::Index>(i) % obj.m());
      Vector g(model.dim());
      model.c_grad(xs[i], feat, g);
      const Vector num_g = oracle::central_difference(
          [&](const Vector& y) { return model.c_value(y, feat, 0.0); }, xs[i], 1e-5);
      fd[i] = (g - num_g).cwiseAbs().maxCoeff();
    });
    worst_mem = std::max(worst_mem, *std::max_element(mem.begin(), mem.end()));
    worst_fd = std::max(worst_fd, *std::max_element(fd.begin(), fd.end()));
    probes += count;
  }
  return {worst_mem < 1e-10 && worst_fd <= 1e-6, "max dist(G_S, zonotope)=" + num(worst_mem) +
                                                     " max |grad - fd|=" + num(worst_fd) + " over " +
                                                     std::to_string(probes) + " probes"};
}

Outcome c6_rate_m() {
  bool ok = true;
  std::string detail;
  double total = 0.0;
  for (const char* name : {"rate_m_pr.json", "rate_m_bd.json", "rate_m_ms.json"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = config(name);
    const ExperimentResult res = run_and_save(cfg, std::string("c6_") + cfg.model, g_threads);
    const double secs = seconds_since(t0);
    total += secs;
    const double slope = res.rate->slope, r2 = res.rate->r2;
    const bool this_ok = slope >= -0.65 && slope <= -0.35 && r2 >= 0.9 && secs < 20 * 60;
    ok = ok && this_ok;
    detail += cfg.model + ": slope=" + num(slope) + " r2=" + num(r2) + " t=" + num(secs) + "s" +
              (this_ok ? "" : " [out of band]") + "; ";
  }
  return {ok, detail + "total " + num(total) + "s"};
}

Outcome c7_rate_d() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = config("rate_d_pr.json");
  const ExperimentResult res = run_and_save(cfg, "c7", g_threads);
  const double secs = seconds_since(t0);
  const double slope = res.rate->slope;
  const bool mono = res.fit["medians_monotone"].get<bool>();
  return {slope >= 0.3 && slope <= 0.8 && mono && secs < 10 * 60,
          "slope=" + num(slope) + " r2=" + num(res.rate->r2) + " monotone=" + (mono ? "yes" : "no") +
              " t=" + num(secs) + "s"};
}

Outcome c8_peeling() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = config("peeling_pr.json");
  const ExperimentResult res = run_and_save(cfg, "c8", g_threads);
  const double secs = seconds_since(t0);
  const double slope = res.rate->slope;
  const double zero = res.fit["gap_at_zero"].get<double>();
  return {slope >= 0.7 && slope <= 1.3 && zero == 0.0 && secs < 5 * 60,
          "slope=" + num(slope) + " r2=" + num(res.rate->r2) + " gap(0)=" + num(zero) + " t=" + num(secs) + "s"};
}

Outcome c9_landscape() {
  const double c = solve_c_constant();
  const double resid = std::abs(c_equation(c));
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = config("landscape_pr.json");
  const ExperimentResult res = run_and_save(cfg, "c9", g_threads);
  const double secs = seconds_since(t0);
  const double worst = res.fit["worst_accepted_dist"].get<double>();
  const double rho = res.fit["spearman"].get<double>();
  const int accepted = res.fit["accepted"].get<int>(), terminals = res.fit["terminals"].get<int>();
  const bool ok = resid < 1e-12 && c > 0.4 && c < 0.5 && accepted > 0 && worst <= 0.2 && rho <= -0.8 &&
                  res.fit["cells"].size() == cfg.m_grid.size() && secs < 20 * 60;
  return {ok, "c=" + num(c) + " residual=" + num(resid) + " accepted " + std::to_string(accepted) + "/" +
                  std::to_string(terminals) + " worst dist/|xb|=" + num(worst) + " spearman=" + num(rho) +
                  " t=" + num(secs) + "s"};
}

Outcome c10_vc() {
  std::size_t configs = 0, over = 0;
  Rng rng(0xacca);
  for (int d = 1; d <= 3; ++d)
    for (int K = 1; K <= 2; ++K)
      for (int N : {1, 2, 4, 8}) {
        std::vector<Polynomial> polys;
        for (int i = 0; i < N; ++i) {
          const Vector lin = gauss(rng, d);
          const Matrix Q = K == 2 ? Matrix(gauss(rng, d * d).reshaped(d, d)) : Matrix::Zero(d, d);
          const double c0 = gauss(rng, 1)[0];
          polys.push_back([lin, Q, c0](const Vector& x) { return c0 + lin.dot(x) + x.dot(Q * x); });
        }
        const auto spc = count_sign_patterns(polys, d, K, 5000, derive_seed(0xacca, configs));
        ++configs;
        if (!spc.within_bound || static_cast<double>(spc.count) > spc.bound) ++over;
      }
  const std::vector<std::pair<std::string, CompositeModel>> fams = {
      {"pr1", CompositeModel::phase_retrieval(1)},   {"pr2", CompositeModel::phase_retrieval(2)},
      {"ms2x1", CompositeModel::matrix_sensing(2, 1)}, {"bd1+1", CompositeModel::blind_deconv(1, 1)},
      {"generic2", CompositeModel::generic_linear(2)}};
  bool reverify = true, le = true;
  std::size_t ncert = 0;
  std::string detail;
  ShatterOptions so;
  so.threads = g_threads;
  for (std::size_t f = 0; f < fams.size(); ++f) {
    const auto fam = ThresholdFamily::from_model(fams[f].second);
    std::vector<ShatterCertificate> certs;
    const int lo = vc_lower_bound(fam, 8, derive_seed(0xaccb, f), so, 3, &certs);
    const int hi = vc_upper_bound_poly(fam.param_dim, fam.degree);
    for (const auto& c : certs) reverify = reverify && c.reverify(fam);
    ncert += certs.size();
    le = le && lo <= hi;
    detail += fams[f].first + " " + std::to_string(lo) + "<=" + std::to_string(hi) + " ";
  }
  return {over == 0 && reverify && le, std::to_string(configs - over) + "/" + std::to_string(configs) +
                                           " sign-pattern counts within bound; " + std::to_string(ncert) +
                                           " certificates re-verified=" + (reverify ? "yes" : "no") + "; " + detail};
}

Outcome c11_determinism() {
  struct Job {
    std::string file;
    int trials;  // < 0 keeps the config value
  };
  std::vector<Job> jobs = {{"verify.json", -1},    {"peeling_pr.json", -1}, {"rate_m_pr.json", 2},
                           {"rate_m_bd.json", 2},  {"rate_m_ms.json", 2},   {"rate_d_pr.json", 2},
                           {"landscape_pr.json", 1}};
  if (g_full_det)
    for (auto& j : jobs) j.trials = -1;
  bool ok = true;
  std::string detail;
  for (const auto& j : jobs) {
    ExperimentConfig cfg = config(j.file);
    if (j.trials > 0) cfg.trials = j.trials;
    const std::string a = records_csv(run_experiment(cfg, 1));
    const std::string b = records_csv(run_experiment(cfg, 8));
    const bool same = a == b && !a.empty();
    ok = ok && same;
    detail += j.file + (j.trials > 0 ? "(trials=" + std::to_string(j.trials) + ")" : "") + (same ? " same" : " DIFFER") +
              "; ";
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string only;
  std::string out = (fs::temp_directory_path() / "subdiff_acceptance").string();
  g_threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", g_threads);
  app.add_option("--only", only, "comma-separated criterion numbers");
  app.add_option("--out", out, "directory for experiment outputs");
  app.add_flag("--full-determinism", g_full_det, "rerun every config at full size for criterion 11");
  CLI11_PARSE(app, argc, argv);
  g_out = out;
  fs::create_directories(g_out);

  std::set<int> selected;
  std::stringstream ss(only);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) selected.insert(std::stoi(tok));

  const std::vector<std::pair<std::string, Outcome (*)()>> criteria = {
      {"remark A", c1_remark_a},          {"remark B", c2_remark_b},
      {"selection-to-set property", c3_theorem1}, {"set calculus oracles", c4_set_calculus},
      {"subgradient correctness", c5_subgradient}, {"rate in m", c6_rate_m},
      {"rate in d", c7_rate_d},            {"peeling", c8_peeling},
      {"landscape", c9_landscape},         {"vc toolkit", c10_vc},
      {"determinism", c11_determinism}};
  const double limits[] = {1, 10, 30, 60, 30, 1e9, 1e9, 1e9, 1e9, 300, 1e9};

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (secs > limits[i]) {
      o.pass = false;
      o.detail += " [runtime " + num(secs) + "s over " + num(limits[i]) + "s]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %-26s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
