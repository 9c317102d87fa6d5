#include "subdiff.h"

#include "subdiff/analytic_1d.hpp"
#include "subdiff/experiments.hpp"
#include "subdiff/landscape.hpp"
#include "subdiff/subgradient_maps.hpp"
#include "subdiff/vc_toolkit.hpp"

#include <fstream>
#include <memory>
#include <new>
#include <string>

using namespace subdiff;

struct sd_body {
  ConvexBody body;
};
struct sd_loss {
  ScalarConvexLoss loss;
};
struct sd_dataset {
  Dataset data;
};
struct sd_objective {
  EmpiricalObjective obj;
};
struct sd_oracle {
  PopulationOracle oracle;
};

namespace {

thread_local std::string g_last_error;

sd_status set_error(sd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

sd_status from_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return SD_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return SD_ERR_DIMENSION_MISMATCH;
    case ErrorCode::unsupported: return SD_ERR_UNSUPPORTED;
    case ErrorCode::io: return SD_ERR_IO;
    case ErrorCode::config: return SD_ERR_CONFIG;
    case ErrorCode::unavailable: return SD_ERR_UNAVAILABLE;
    case ErrorCode::internal: return SD_ERR_INTERNAL;
  }
  return SD_ERR_INTERNAL;
}

template <class Fn>
sd_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return set_error(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SD_ERR_INTERNAL, "unknown exception");
  }
}

#define SD_REQUIRE_PTR(p)                                               \
  do {                                                                  \
    if (!(p)) return set_error(SD_ERR_NULL_HANDLE, #p " is NULL");      \
  } while (0)

Vector vec(const double* p, int d) {
  require(d >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
  require(p != nullptr, ErrorCode::invalid_argument, "vector pointer is NULL");
  return Eigen::Map<const Vector>(p, d);
}

std::vector<Vector> rows(const double* p, int n, int d) {
  require(n >= 1 && d >= 1, ErrorCode::invalid_argument, "need n >= 1 and d >= 1");
  require(p != nullptr, ErrorCode::invalid_argument, "array pointer is NULL");
  std::vector<Vector> out;
  for (int i = 0; i < n; ++i) out.push_back(Eigen::Map<const Vector>(p + static_cast<std::ptrdiff_t>(i) * d, d));
  return out;
}

template <class T, class... A>
sd_status emit(T** out, A&&... args) {
  SD_REQUIRE_PTR(out);
  *out = new T{std::forward<A>(args)...};
  return SD_OK;
}

DistributionSpec distribution(const char* name, double sigma) {
  const std::string n = name ? name : "gaussian";
  if (n == "gaussian") return DistributionSpec::gaussian(sigma);
  if (n == "rademacher_cube") return DistributionSpec::rademacher_cube(sigma);
  fail(ErrorCode::invalid_argument, "unknown distribution '" + n + "'");
}

PiecewiseLinearConvexFn pl(const double* bp, int n, const double* sl) {
  require(n >= 0, ErrorCode::invalid_argument, "breakpoint count must be >= 0");
  require(sl != nullptr && (n == 0 || bp != nullptr), ErrorCode::invalid_argument, "NULL array");
  return PiecewiseLinearConvexFn(std::vector<double>(bp, bp + n), std::vector<double>(sl, sl + n + 1));
}

}  // namespace

extern "C" {

SD_API const char* sd_version(void) { return "0.1.0"; }
SD_API const char* sd_last_error(void) { return g_last_error.c_str(); }

SD_API const char* sd_status_string(sd_status s) {
  switch (s) {
    case SD_OK: return "ok";
    case SD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SD_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case SD_ERR_UNSUPPORTED: return "unsupported";
    case SD_ERR_IO: return "i/o error";
    case SD_ERR_CONFIG: return "config error";
    case SD_ERR_UNAVAILABLE: return "unavailable";
    case SD_ERR_ACCEPTANCE: return "acceptance failure";
    case SD_ERR_INTERNAL: return "internal error";
    case SD_ERR_NULL_HANDLE: return "null handle";
  }
  return "unknown status";
}

// ---- bodies

SD_API sd_status sd_body_point(const double* p, int d, sd_body** out) {
  return guarded([&] { return emit(out, ConvexBody::point(vec(p, d))); });
}

SD_API sd_status sd_body_interval(double lo, double hi, sd_body** out) {
  return guarded([&] { return emit(out, ConvexBody::interval(lo, hi)); });
}

SD_API sd_status sd_body_vpolytope(const double* points, int n, int d, sd_body** out) {
  return guarded([&] { return emit(out, ConvexBody::vpolytope(rows(points, n, d))); });
}

SD_API sd_status sd_body_zonotope(const double* center, int d, const double* generators, int k, sd_body** out) {
  return guarded([&] {
    std::vector<Vector> gens;
    if (k > 0) gens = rows(generators, k, d);
    require(k >= 0, ErrorCode::invalid_argument, "generator count must be >= 0");
    return emit(out, ConvexBody::zonotope(vec(center, d), std::move(gens)));
  });
}

SD_API sd_status sd_body_convex_hull(const double* points, int n, int d, sd_body** out) {
  return guarded([&] { return emit(out, convex_hull(rows(points, n, d))); });
}

SD_API sd_status sd_body_minkowski_sum(const sd_body* a, const sd_body* b, sd_body** out) {
  SD_REQUIRE_PTR(a);
  SD_REQUIRE_PTR(b);
  return guarded([&] { return emit(out, minkowski_sum(a->body, b->body)); });
}

SD_API void sd_body_free(sd_body* b) { delete b; }

SD_API sd_status sd_body_dim(const sd_body* b, int* d) {
  SD_REQUIRE_PTR(b);
  SD_REQUIRE_PTR(d);
  *d = b->body.dim();
  return SD_OK;
}

SD_API sd_status sd_body_support(const sd_body* b, const double* u, int d, double* value) {
  SD_REQUIRE_PTR(b);
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    require_dim(d, b->body.dim(), "sd_body_support");
    *value = support_unnormalized(b->body, vec(u, d));
    return SD_OK;
  });
}

SD_API sd_status sd_body_distance(const sd_body* b, const double* y, int d, double* value) {
  SD_REQUIRE_PTR(b);
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    require_dim(d, b->body.dim(), "sd_body_distance");
    *value = dist_point_to_body(vec(y, d), b->body);
    return SD_OK;
  });
}

SD_API sd_status sd_deviation(const sd_body* a, const sd_body* b, double* value, int* exact) {
  SD_REQUIRE_PTR(a);
  SD_REQUIRE_PTR(b);
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    const SetDistance r = deviation(a->body, b->body);
    *value = r.value;
    if (exact) *exact = r.exact ? 1 : 0;
    return SD_OK;
  });
}

SD_API sd_status sd_hausdorff(const sd_body* a, const sd_body* b, double* value, int* exact) {
  SD_REQUIRE_PTR(a);
  SD_REQUIRE_PTR(b);
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    const SetDistance r = hausdorff(a->body, b->body);
    *value = r.value;
    if (exact) *exact = r.exact ? 1 : 0;
    return SD_OK;
  });
}

// ---- losses

SD_API sd_status sd_loss_builtin(const char* name, double pinball_alpha, sd_loss** out) {
  SD_REQUIRE_PTR(name);
  return guarded([&] { return emit(out, ScalarConvexLoss::builtin(name, pinball_alpha)); });
}

SD_API sd_status sd_loss_from_slopes(const double* breakpoints, int nb, const double* slopes, double value0,
                                     sd_loss** out) {
  return guarded([&] {
    require(nb >= 0 && slopes && (nb == 0 || breakpoints), ErrorCode::invalid_argument, "bad slope arrays");
    return emit(out, ScalarConvexLoss::from_slopes(std::vector<double>(breakpoints, breakpoints + nb),
                                                   std::vector<double>(slopes, slopes + nb + 1), value0));
  });
}

SD_API void sd_loss_free(sd_loss* h) { delete h; }

SD_API sd_status sd_loss_eval(const sd_loss* h, double z, double* value) {
  SD_REQUIRE_PTR(h);
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    *value = h->loss.eval(z);
    return SD_OK;
  });
}

SD_API sd_status sd_loss_subdiff(const sd_loss* h, double z, double* lo, double* hi) {
  SD_REQUIRE_PTR(h);
  SD_REQUIRE_PTR(lo);
  SD_REQUIRE_PTR(hi);
  return guarded([&] {
    const Interval1D iv = h->loss.subdiff_interval(z);
    *lo = iv.lo;
    *hi = iv.hi;
    return SD_OK;
  });
}

SD_API sd_status sd_loss_selection(const sd_loss* h, double z, double* g) {
  SD_REQUIRE_PTR(h);
  SD_REQUIRE_PTR(g);
  return guarded([&] {
    *g = h->loss.selection_g(z);
    return SD_OK;
  });
}

SD_API sd_status sd_loss_zeta(const sd_loss* h, double* zeta) {
  SD_REQUIRE_PTR(h);
  SD_REQUIRE_PTR(zeta);
  *zeta = h->loss.zeta();
  return SD_OK;
}

// ---- datasets

SD_API sd_status sd_dataset_draw(const char* model, const int* dims, int ndims, const char* distribution_name,
                                 double sigma, const double* x_bar, int d, int64_t m, uint64_t seed, int threads,
                                 sd_dataset** out) {
  SD_REQUIRE_PTR(model);
  SD_REQUIRE_PTR(dims);
  return guarded([&] {
    require(ndims >= 1, ErrorCode::invalid_argument, "need at least one dimension");
    const CompositeModel cm = CompositeModel::from_name(model, std::vector<int>(dims, dims + ndims));
    require_dim(d, cm.dim(), "sd_dataset_draw ground truth");
    require(m >= 1, ErrorCode::invalid_argument, "m must be >= 1");
    return emit(out, draw_dataset(cm, distribution(distribution_name, sigma), vec(x_bar, d), m, seed, threads));
  });
}

SD_API sd_status sd_dataset_load_csv(const char* path, sd_dataset** out) {
  SD_REQUIRE_PTR(path);
  return guarded([&] { return emit(out, load_dataset_csv(path)); });
}

SD_API sd_status sd_dataset_save_csv(const sd_dataset* ds, const char* path) {
  SD_REQUIRE_PTR(ds);
  SD_REQUIRE_PTR(path);
  return guarded([&] {
    save_dataset_csv(ds->data, path);
    return SD_OK;
  });
}

SD_API void sd_dataset_free(sd_dataset* ds) { delete ds; }

SD_API sd_status sd_dataset_size(const sd_dataset* ds, int64_t* m) {
  SD_REQUIRE_PTR(ds);
  SD_REQUIRE_PTR(m);
  *m = ds->data.size();
  return SD_OK;
}

SD_API sd_status sd_dataset_dim(const sd_dataset* ds, int* d) {
  SD_REQUIRE_PTR(ds);
  SD_REQUIRE_PTR(d);
  return guarded([&] {
    *d = CompositeModel::from_name(model_kind_name(ds->data.kind), ds->data.shape).dim();
    return SD_OK;
  });
}

// ---- objectives and oracles

SD_API sd_status sd_objective_create(const sd_dataset* ds, const sd_loss* h, sd_objective** out) {
  SD_REQUIRE_PTR(ds);
  SD_REQUIRE_PTR(h);
  return guarded([&] {
    CompositeModel cm = CompositeModel::from_name(model_kind_name(ds->data.kind), ds->data.shape);
    return emit(out, EmpiricalObjective(std::move(cm), h->loss, ds->data));
  });
}

SD_API void sd_objective_free(sd_objective* f) { delete f; }

SD_API sd_status sd_objective_dim(const sd_objective* f, int* d) {
  SD_REQUIRE_PTR(f);
  SD_REQUIRE_PTR(d);
  *d = f->obj.dim();
  return SD_OK;
}

SD_API sd_status sd_objective_value(const sd_objective* f, const double* x, int d, double* value) {
  SD_REQUIRE_PTR(f);
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    require_dim(d, f->obj.dim(), "sd_objective_value");
    *value = f->obj.value(vec(x, d));
    return SD_OK;
  });
}

SD_API sd_status sd_objective_selection(const sd_objective* f, const double* x, int d, double* g) {
  SD_REQUIRE_PTR(f);
  SD_REQUIRE_PTR(g);
  return guarded([&] {
    require_dim(d, f->obj.dim(), "sd_objective_selection");
    Eigen::Map<Vector>(g, d) = f->obj.G_S(vec(x, d));
    return SD_OK;
  });
}

SD_API sd_status sd_objective_subdiff(const sd_objective* f, const double* x, int d, sd_body** out) {
  SD_REQUIRE_PTR(f);
  return guarded([&] {
    require_dim(d, f->obj.dim(), "sd_objective_subdiff");
    return emit(out, f->obj.subdiff(vec(x, d)));
  });
}

SD_API sd_status sd_oracle_create(const sd_objective* f, const char* strategy, const char* distribution_name,
                                  double sigma, const double* x_bar, int d, int64_t m_pop, uint64_t seed, int threads,
                                  sd_oracle** out) {
  SD_REQUIRE_PTR(f);
  SD_REQUIRE_PTR(strategy);
  return guarded([&] {
    require_dim(d, f->obj.dim(), "sd_oracle_create ground truth");
    const DistributionSpec dist = distribution(distribution_name, sigma);
    const std::string s = strategy;
    if (s == "closed_form")
      return emit(out, PopulationOracle::closed_form(f->obj.model(), f->obj.loss(), dist, vec(x_bar, d)));
    require(s == "mega_sample", ErrorCode::invalid_argument, "unknown oracle strategy '" + s + "'");
    require(m_pop >= 1, ErrorCode::invalid_argument, "m_pop must be >= 1");
    return emit(out, PopulationOracle::mega_sample(f->obj.model(), f->obj.loss(), dist, vec(x_bar, d), m_pop, seed,
                                                   threads));
  });
}

SD_API void sd_oracle_free(sd_oracle* o) { delete o; }

SD_API sd_status sd_oracle_gradient(const sd_oracle* o, const double* x, int d, double* g, double* error_bound) {
  SD_REQUIRE_PTR(o);
  SD_REQUIRE_PTR(g);
  return guarded([&] {
    require_dim(d, o->oracle.dim(), "sd_oracle_gradient");
    const PopEstimate e = o->oracle.G(vec(x, d));
    Eigen::Map<Vector>(g, d) = e.value;
    if (error_bound) *error_bound = e.error_bound;
    return SD_OK;
  });
}

SD_API sd_status sd_sup_gap(const sd_objective* f, const sd_oracle* o, const double* x0, int d, double r, int budget,
                            uint64_t seed, int refine_starts, int refine_steps, double* value, double* argmax) {
  SD_REQUIRE_PTR(f);
  SD_REQUIRE_PTR(o);
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    require_dim(d, f->obj.dim(), "sd_sup_gap");
    SupGapOptions opts;
    opts.refine_starts = refine_starts;
    opts.refine_steps = refine_steps;
    const SupGapResult res = sup_gap_over_ball(f->obj, o->oracle, vec(x0, d), r, budget, seed, opts);
    *value = res.value;
    if (argmax) Eigen::Map<Vector>(argmax, d) = res.argmax;
    return SD_OK;
  });
}

// ---- analytic 1-d

SD_API sd_status sd_pl_d1(const double* bp1, int n1, const double* sl1, const double* bp2, int n2, const double* sl2,
                          double a, double b, double* value) {
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    *value = d1_metric(pl(bp1, n1, sl1), pl(bp2, n2, sl2), a, b);
    return SD_OK;
  });
}

SD_API sd_status sd_pl_d2(const double* bp1, int n1, const double* sl1, const double* bp2, int n2, const double* sl2,
                          double a, double b, double* value) {
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    *value = d2_graph_metric(pl(bp1, n1, sl1), pl(bp2, n2, sl2), a, b);
    return SD_OK;
  });
}

// ---- landscape and VC

SD_API sd_status sd_landscape_c(double* c) {
  SD_REQUIRE_PTR(c);
  return guarded([&] {
    *c = solve_c_constant();
    return SD_OK;
  });
}

SD_API sd_status sd_dist_to_population_Z(const double* x, const double* x_bar, int d, double* value) {
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    *value = dist_to_population_Z(vec(x, d), vec(x_bar, d));
    return SD_OK;
  });
}

SD_API sd_status sd_vc_upper_bound(int d, int K, int* n) {
  SD_REQUIRE_PTR(n);
  return guarded([&] {
    *n = vc_upper_bound_poly(d, K);
    return SD_OK;
  });
}

SD_API sd_status sd_sign_pattern_bound(int N, int d, int K, double* bound) {
  SD_REQUIRE_PTR(bound);
  return guarded([&] {
    *bound = sign_pattern_bound(N, d, K);
    return SD_OK;
  });
}

SD_API sd_status sd_delta_rate(int d, double vc, double m, double delta, double* value) {
  SD_REQUIRE_PTR(value);
  return guarded([&] {
    *value = delta_rate(d, vc, m, delta);
    return SD_OK;
  });
}

// ---- experiments

SD_API sd_status sd_run_experiment(const char* kind, const char* config_path, const char* out_dir, int threads,
                                   int has_seed, uint64_t seed) {
  SD_REQUIRE_PTR(kind);
  SD_REQUIRE_PTR(config_path);
  SD_REQUIRE_PTR(out_dir);
  return guarded([&] {
    const ExperimentKind k = experiment_kind_from_name(kind);
    std::ifstream in(config_path);
    if (!in) fail(ErrorCode::config, std::string("config: cannot open '") + config_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::config, std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::config, "config: top level must be an object");
    if (!j.contains("kind")) j["kind"] = experiment_kind_name(k);
    if (has_seed) j["seed"] = seed;
    const ExperimentConfig cfg = parse_config(j);
    if (cfg.kind != k)
      fail(ErrorCode::config, "config: kind '" + experiment_kind_name(cfg.kind) + "' does not match command '" +
                                  std::string(kind) + "'");
    const ExperimentResult res = run_experiment(cfg, threads);
    write_outputs(res, cfg, out_dir);
    if (!res.passed) {
      std::string failed;
      for (const auto& c : res.checks)
        if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.module + "/" + c.name;
      return set_error(SD_ERR_ACCEPTANCE, "failing checks: " + failed);
    }
    return SD_OK;
  });
}

}  // extern "C"
