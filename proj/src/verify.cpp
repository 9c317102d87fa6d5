#include "subdiff/analytic_1d.hpp"
#include "subdiff/experiments.hpp"
#include "subdiff/landscape.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/subgradient_maps.hpp"
#include "subdiff/vc_toolkit.hpp"

#include <algorithm>
#include <cmath>

namespace subdiff {

namespace {

CheckResult check(std::string module, std::string name, double value, double tol, bool passed,
                  std::string detail = {}) {
  return {std::move(module), std::move(name), passed, value, tol, std::move(detail)};
}

// value <= tol passes
CheckResult bound_check(std::string module, std::string name, double value, double tol, std::string detail = {}) {
  return check(std::move(module), std::move(name), value, tol, value <= tol, std::move(detail));
}

Vector gaussian_vector(Rng& rng, int d, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(d);
  for (int j = 0; j < d; ++j) v[j] = nd(rng);
  return v;
}

ConvexBody random_zonotope(Rng& rng, int d, int k) {
  std::vector<Vector> gens;
  for (int i = 0; i < k; ++i) gens.push_back(gaussian_vector(rng, d, 0.5));
  return ConvexBody::zonotope(gaussian_vector(rng, d, 0.5), std::move(gens));
}

ConvexBody random_vpolytope(Rng& rng, int d, int n) {
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) pts.push_back(gaussian_vector(rng, d));
  return ConvexBody::vpolytope(std::move(pts));
}

ConvexBody random_body(Rng& rng, int d, int max_gens) {
  std::uniform_int_distribution<int> kind(0, 1), k(1, max_gens), n(1, max_gens);
  return kind(rng) ? random_zonotope(rng, d, k(rng)) : random_vpolytope(rng, d, n(rng));
}

// ---- analytic_1d -------------------------------------------------------

void analytic_checks(const VerifySettings& s, std::uint64_t seed, int threads, std::vector<CheckResult>& out) {
  const std::string mod = "analytic_1d";
  const auto f1 = PiecewiseLinearConvexFn::abs_sum({{1.0, 0.0}});
  const auto f2 = PiecewiseLinearConvexFn::abs_sum({{2.0, 0.0}});

  const double h0 = interval_hausdorff(f1.exact_subdiff(0.0), f2.exact_subdiff(0.0));
  out.push_back(bound_check(mod, "remark_a_hausdorff_at_zero", std::abs(h0 - 1.0), 1e-12,
                            "H(d|.|(0), d2|.|(0)) = " + format_double(h0)));

  const SelectionRule zero_rule = [](const PiecewiseLinearConvexFn& f, double x) {
    return x == 0.0 ? 0.0 : f.right_derivative(x);
  };
  const double sel0 = selection_diff_on_points(f1, f2, {0.0}, zero_rule, zero_rule);
  const double d10 = d1_on_points(f1, f2, {0.0});
  out.push_back(check(mod, "remark_a_closed_set", sel0, 1e-12, sel0 <= 1e-12 && std::abs(d10 - 1.0) <= 1e-12,
                      "on {0}: set gap " + format_double(d10) + " > selection gap " + format_double(sel0)));

  double worst = -1e300;
  for (double eps : {1.0, 0.5, 1e-3, 1e-8}) {
    const double lhs = d1_metric(f1, f2, -eps, eps);
    const double rhs = selection_sup_diff(f1, f2, -eps, eps);
    worst = std::max(worst, lhs - rhs);
  }
  out.push_back(bound_check(mod, "remark_a_open_intervals", std::max(0.0, worst), 1e-12));

  double e1 = 0.0, e2 = 0.0;
  for (int n = 1; n <= s.remark_b_n; ++n) {
    const auto g1 = remark_b_f1(n), g2 = remark_b_f2(n);
    e1 = std::max(e1, std::abs(d1_metric(g1, g2, -2.0, 2.0) - 1.0));
    e2 = std::max(e2, std::abs(d2_graph_metric(g1, g2, -2.0, 2.0) - 1.0 / n));
  }
  out.push_back(bound_check(mod, "remark_b_d1", e1, 1e-12, "n = 1.." + std::to_string(s.remark_b_n)));
  out.push_back(bound_check(mod, "remark_b_d2", e2, 1e-12, "n = 1.." + std::to_string(s.remark_b_n)));

  const auto N = static_cast<std::size_t>(std::max(0, s.random_pairs));
  std::vector<double> d2_excess(N), rd_excess(N), rs_excess(N);
  parallel_for(N, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, 0xa1d1, i));
    const auto p = random_pl_convex(rng, -1.0, 1.0, 6);
    const auto q = random_pl_convex(rng, -1.0, 1.0, 6);
    const double d1 = d1_metric(p, q, -1.0, 1.0);
    d2_excess[i] = d2_graph_metric(p, q, -1.0, 1.0) - d1;
    rd_excess[i] = d1 - selection_sup_diff(p, q, -1.0, 1.0);
    double worst_sel = -1e300;
    for (int r = 0; r < 10; ++r) {
      const auto g1 = random_selection_rule(derive_seed(seed, 0xa1d2, 2 * (10 * i + r)));
      const auto g2 = random_selection_rule(derive_seed(seed, 0xa1d2, 2 * (10 * i + r) + 1));
      worst_sel = std::max(worst_sel, d1 - selection_sup_diff(p, q, -1.0, 1.0, g1, g2));
    }
    rs_excess[i] = worst_sel;
  });
  auto max_or_zero = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  };
  const std::string pairs = std::to_string(N) + " random pairs";
  out.push_back(bound_check(mod, "d2_le_d1_random", max_or_zero(d2_excess), 1e-12, pairs));
  out.push_back(bound_check(mod, "theorem1_right_derivative", max_or_zero(rd_excess), 1e-12, pairs));
  out.push_back(bound_check(mod, "theorem1_random_selections", max_or_zero(rs_excess), 1e-12, pairs + " x 10 rules"));
}

// ---- set_calculus ------------------------------------------------------

double point_cloud_hausdorff(const std::vector<Vector>& A, const std::vector<Vector>& B) {
  auto dev = [](const std::vector<Vector>& P, const std::vector<Vector>& Q) {
    double w = 0.0;
    for (const auto& p : P) {
      double best = 1e300;
      for (const auto& q : Q) best = std::min(best, (p - q).norm());
      w = std::max(w, best);
    }
    return w;
  };
  return std::max(dev(A, B), dev(B, A));
}

void set_checks(const VerifySettings& s, std::uint64_t seed, const HausdorffFn& H, int threads,
                std::vector<CheckResult>& out) {
  const std::string mod = "set_calculus";
  const auto n = static_cast<std::size_t>(std::max(0, s.set_instances));
  std::vector<double> asym(n), support_gap(n), tri(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, 0x5e71, i));
    const int d = 1 + static_cast<int>(i % 3);
    const ConvexBody A = random_body(rng, d, 8), B = random_body(rng, d, 8), C = random_body(rng, d, 4);
    const double hab = H(A, B).value, hba = H(B, A).value;
    asym[i] = std::abs(hab - hba);
    const SetDistance hs = hausdorff_support(A, B);
    // exact for d <= 2, a lower bound otherwise
    support_gap[i] = hs.exact ? std::abs(hs.value - hab) : std::max(0.0, hs.value - hab);
    tri[i] = std::max(0.0, hab - H(A, C).value - H(C, B).value);
  });
  auto maxv = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  const std::string inst = std::to_string(n) + " random pairs";
  out.push_back(bound_check(mod, "hausdorff_symmetry", maxv(asym), 1e-9, inst));
  out.push_back(bound_check(mod, "hausdorff_support_agreement", maxv(support_gap), 1e-6, inst));
  out.push_back(bound_check(mod, "triangle_inequality", maxv(tri), 1e-9, inst));

  const auto nc = static_cast<std::size_t>(std::max(0, s.contraction_instances));
  std::vector<double> hull(nc), mink(nc);
  parallel_for(nc, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, 0xc047, i));
    const int d = 1 + static_cast<int>(i % 3);
    std::uniform_int_distribution<int> np(1, 6), kg(1, 3);
    std::vector<Vector> P, Q;
    for (int j = np(rng); j > 0; --j) P.push_back(gaussian_vector(rng, d));
    for (int j = np(rng); j > 0; --j) Q.push_back(gaussian_vector(rng, d));
    hull[i] = std::max(0.0, H(convex_hull(P), convex_hull(Q)).value - point_cloud_hausdorff(P, Q));
    const ConvexBody A = random_zonotope(rng, d, kg(rng)), B = random_zonotope(rng, d, kg(rng)),
                     C = random_zonotope(rng, d, kg(rng));
    mink[i] = std::max(0.0, H(minkowski_sum(A, C), minkowski_sum(B, C)).value - H(A, B).value);
  });
  const std::string cinst = std::to_string(nc) + " random instances";
  out.push_back(bound_check(mod, "hull_contraction", maxv(hull), 1e-9, cinst));
  out.push_back(bound_check(mod, "minkowski_contraction", maxv(mink), 1e-9, cinst));
}

// ---- scalar_loss -------------------------------------------------------

void loss_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  const std::string mod = "scalar_loss";
  std::vector<double> grid;
  for (int i = -600; i <= 600; ++i) grid.push_back(i / 200.0);
  Rng rng(derive_seed(seed, 0x1055));
  std::vector<ScalarConvexLoss> losses = {ScalarConvexLoss::abs_loss(), ScalarConvexLoss::hinge(),
                                          ScalarConvexLoss::pinball(0.3), ScalarConvexLoss::square()};
  for (int r = 0; r < 5; ++r) losses.push_back(random_pl_convex(rng, -2.0, 2.0, 5).to_loss());

  double worst = 0.0;
  int failed = 0;
  for (const auto& h : losses) {
    const DecomposeReport rep = decompose_check(h, grid);
    worst = std::max({worst, rep.max_residual, rep.max_gsm_jump, rep.max_monotone_violation,
                      rep.max_convexity_violation});
    failed += rep.ok ? 0 : 1;
  }
  out.push_back(check("scalar_loss", "decompose_check", worst, 1e-9, failed == 0,
                      std::to_string(failed) + " of " + std::to_string(losses.size()) + " losses failed"));

  const double zeta_err = std::max({std::abs(ScalarConvexLoss::abs_loss().zeta() - 3.0),
                                    std::abs(ScalarConvexLoss::hinge().zeta() - 2.0),
                                    std::abs(ScalarConvexLoss::pinball(0.3).zeta() - 2.0),
                                    std::abs(ScalarConvexLoss::square().zeta() - 1.0)});
  out.push_back(bound_check(mod, "zeta_values", zeta_err, 0.0));

  double miss = 0.0;
  std::uniform_real_distribution<double> uz(-3.0, 3.0);
  for (const auto& h : losses) {
    std::vector<double> zs;
    for (const auto& k : h.kinks()) zs.push_back(k.t);
    for (int i = 0; i < 200; ++i) zs.push_back(uz(rng));
    for (double z : zs) {
      const Interval1D iv = h.subdiff_interval(z);
      const double g = h.selection_g(z);
      miss = std::max({miss, iv.lo - g, g - iv.hi});
    }
  }
  out.push_back(bound_check(mod, "selection_in_subdiff", std::max(0.0, miss), 1e-12));
}

// ---- vc_toolkit ----------------------------------------------------------

void vc_checks(std::uint64_t seed, int threads, std::vector<CheckResult>& out) {
  const std::string mod = "vc_toolkit";
  int over = 0;
  double worst_ratio = 0.0;
  int cfg_index = 0;
  for (int d : {1, 2, 3}) {
    for (int K : {1, 2}) {
      for (int N : {1, 3, 6}) {
        Rng rng(derive_seed(seed, 0x5191, static_cast<std::uint64_t>(cfg_index++)));
        std::vector<Polynomial> polys;
        for (int p = 0; p < N; ++p) {
          const Vector lin = gaussian_vector(rng, d);
          const Matrix Q = K == 2 ? Matrix(gaussian_vector(rng, d * d).reshaped(d, d)) : Matrix::Zero(d, d);
          const double c0 = std::normal_distribution<double>()(rng);
          polys.push_back([lin, Q, c0](const Vector& x) { return c0 + lin.dot(x) + x.dot(Q * x); });
        }
        const SignPatternCount spc = count_sign_patterns(polys, d, K, 2000, derive_seed(seed, 0x5192, cfg_index));
        if (!spc.within_bound) ++over;
        worst_ratio = std::max(worst_ratio, static_cast<double>(spc.count) / spc.bound);
      }
    }
  }
  out.push_back(check(mod, "sign_patterns_within_bound", worst_ratio, 1.0, over == 0,
                      std::to_string(cfg_index) + " configurations"));

  struct Fam {
    std::string label;
    CompositeModel model;
  };
  std::vector<Fam> fams = {{"pr d=1", CompositeModel::phase_retrieval(1)},
                           {"pr d=2", CompositeModel::phase_retrieval(2)},
                           {"ms 2x1", CompositeModel::matrix_sensing(2, 1)},
                           {"bd 1+1", CompositeModel::blind_deconv(1, 1)},
                           {"generic d=2", CompositeModel::generic_linear(2)}};
  bool all_reverify = true, all_le = true;
  double worst_margin = -1e300;
  std::string detail;
  ShatterOptions so;
  so.threads = threads;
  for (std::size_t f = 0; f < fams.size(); ++f) {
    const auto fam = ThresholdFamily::from_model(fams[f].model);
    std::vector<ShatterCertificate> certs;
    const int lo = vc_lower_bound(fam, 8, derive_seed(seed, 0x5c47, f), so, 3, &certs);
    const int hi = vc_upper_bound_poly(fam.param_dim, fam.degree);
    for (const auto& c : certs) all_reverify = all_reverify && c.reverify(fam);
    all_le = all_le && lo <= hi;
    worst_margin = std::max(worst_margin, static_cast<double>(lo - hi));
    detail += (f ? "; " : "") + fams[f].label + ": " + std::to_string(lo) + " <= " + std::to_string(hi);
  }
  out.push_back(check(mod, "shatter_certificates_reverify", all_reverify ? 0.0 : 1.0, 0.0, all_reverify));
  out.push_back(check(mod, "vc_lower_le_upper", worst_margin, 0.0, all_le, detail));
}

// ---- subgradient_maps ----------------------------------------------------

void subgradient_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  double worst = 0.0;
  int probes = 0;
  const std::vector<CompositeModel> models = {CompositeModel::phase_retrieval(4), CompositeModel::matrix_sensing(3, 2),
                                              CompositeModel::blind_deconv(3, 2)};
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& model = models[k];
    Rng xr(derive_seed(seed, 0x5b9, k));
    Vector xb = gaussian_vector(xr, model.dim());
    xb /= xb.norm();
    EmpiricalObjective obj(model, ScalarConvexLoss::abs_loss(),
                           draw_dataset(model, DistributionSpec::gaussian(1.0), xb, 64, derive_seed(seed, 0x5ba, k)));
    Rng rng(derive_seed(seed, 0x5bb, k));
    std::vector<Vector> xs = {xb, Vector::Zero(model.dim())};
    for (int i = 0; i < 30; ++i) xs.push_back(gaussian_vector(rng, model.dim()));
    for (const auto& x : xs) {
      worst = std::max(worst, project(obj.G_S(x), obj.subdiff(x), 1e-13).distance);
      ++probes;
    }
  }
  out.push_back(bound_check("subgradient_maps", "selection_in_zonotope", worst, 1e-10,
                            std::to_string(probes) + " probes over pr, ms, bd"));
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const VerifySettings& s, std::uint64_t seed, const HausdorffFn& hausdorff_fn,
                                          int threads) {
  std::vector<CheckResult> out;
  analytic_checks(s, seed, threads, out);
  set_checks(s, seed, hausdorff_fn, threads, out);
  loss_checks(seed, out);
  vc_checks(seed, threads, out);
  subgradient_checks(seed, out);
  const double c = solve_c_constant();
  out.push_back(check("landscape", "c_constant", std::abs(c_equation(c)), 1e-12,
                      std::abs(c_equation(c)) < 1e-12 && c > 0.4 && c < 0.5, "c = " + format_double(c)));
  return out;
}

}  // namespace subdiff
