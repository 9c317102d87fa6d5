#ifndef SUBDIFF_H
#define SUBDIFF_H

/*
 * C interface to libsubdiff. Objects are opaque handles created by
 * sd_*_create style calls and released with the matching sd_*_free.
 * Every call returns an sd_status; on failure sd_last_error() holds a
 * message for the calling thread until its next failing call.
 *
 * Arrays of vectors are row-major: n vectors of length d occupy n*d doubles.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(SUBDIFF_BUILDING_LIBRARY)
#define SD_API __attribute__((visibility("default")))
#else
#define SD_API
#endif

typedef enum sd_status {
  SD_OK = 0,
  SD_ERR_INVALID_ARGUMENT = 1,
  SD_ERR_DIMENSION_MISMATCH = 2,
  SD_ERR_UNSUPPORTED = 3,
  SD_ERR_IO = 4,
  SD_ERR_CONFIG = 5,
  SD_ERR_UNAVAILABLE = 6,
  SD_ERR_ACCEPTANCE = 7,
  SD_ERR_INTERNAL = 8,
  SD_ERR_NULL_HANDLE = 9
} sd_status;

typedef struct sd_body sd_body;
typedef struct sd_loss sd_loss;
typedef struct sd_dataset sd_dataset;
typedef struct sd_objective sd_objective;
typedef struct sd_oracle sd_oracle;

SD_API const char* sd_version(void);
SD_API const char* sd_last_error(void);
SD_API const char* sd_status_string(sd_status s);

/* convex bodies */
SD_API sd_status sd_body_point(const double* p, int d, sd_body** out);
SD_API sd_status sd_body_interval(double lo, double hi, sd_body** out);
SD_API sd_status sd_body_vpolytope(const double* points, int n, int d, sd_body** out);
SD_API sd_status sd_body_zonotope(const double* center, int d, const double* generators, int k, sd_body** out);
SD_API sd_status sd_body_convex_hull(const double* points, int n, int d, sd_body** out);
SD_API sd_status sd_body_minkowski_sum(const sd_body* a, const sd_body* b, sd_body** out);
SD_API void sd_body_free(sd_body* b);
SD_API sd_status sd_body_dim(const sd_body* b, int* d);
SD_API sd_status sd_body_support(const sd_body* b, const double* u, int d, double* value);
SD_API sd_status sd_body_distance(const sd_body* b, const double* y, int d, double* value);

/* exact is set to 1 when the value is exact, 0 for a sampled lower bound; may be NULL */
SD_API sd_status sd_deviation(const sd_body* a, const sd_body* b, double* value, int* exact);
SD_API sd_status sd_hausdorff(const sd_body* a, const sd_body* b, double* value, int* exact);

/* scalar losses: "abs", "hinge", "pinball", "square" */
SD_API sd_status sd_loss_builtin(const char* name, double pinball_alpha, sd_loss** out);
SD_API sd_status sd_loss_from_slopes(const double* breakpoints, int nb, const double* slopes, double value0,
                                     sd_loss** out);
SD_API void sd_loss_free(sd_loss* h);
SD_API sd_status sd_loss_eval(const sd_loss* h, double z, double* value);
SD_API sd_status sd_loss_subdiff(const sd_loss* h, double z, double* lo, double* hi);
SD_API sd_status sd_loss_selection(const sd_loss* h, double z, double* g);
SD_API sd_status sd_loss_zeta(const sd_loss* h, double* zeta);

/* datasets: model "pr" | "ms" | "bd" | "generic", distribution "gaussian" | "rademacher_cube" */
SD_API sd_status sd_dataset_draw(const char* model, const int* dims, int ndims, const char* distribution, double sigma,
                                 const double* x_bar, int d, int64_t m, uint64_t seed, int threads,
                                 sd_dataset** out);
SD_API sd_status sd_dataset_load_csv(const char* path, sd_dataset** out);
SD_API sd_status sd_dataset_save_csv(const sd_dataset* ds, const char* path);
SD_API void sd_dataset_free(sd_dataset* ds);
SD_API sd_status sd_dataset_size(const sd_dataset* ds, int64_t* m);
SD_API sd_status sd_dataset_dim(const sd_dataset* ds, int* d);

/* empirical objective (1/m) sum h(c(x; xi_i)) over a dataset */
SD_API sd_status sd_objective_create(const sd_dataset* ds, const sd_loss* h, sd_objective** out);
SD_API void sd_objective_free(sd_objective* f);
SD_API sd_status sd_objective_dim(const sd_objective* f, int* d);
SD_API sd_status sd_objective_value(const sd_objective* f, const double* x, int d, double* value);
SD_API sd_status sd_objective_selection(const sd_objective* f, const double* x, int d, double* g);
SD_API sd_status sd_objective_subdiff(const sd_objective* f, const double* x, int d, sd_body** out);

/* population oracle for the objective's model and loss: "mega_sample" | "closed_form" */
SD_API sd_status sd_oracle_create(const sd_objective* f, const char* strategy, const char* distribution, double sigma,
                                  const double* x_bar, int d, int64_t m_pop, uint64_t seed, int threads,
                                  sd_oracle** out);
SD_API void sd_oracle_free(sd_oracle* o);
SD_API sd_status sd_oracle_gradient(const sd_oracle* o, const double* x, int d, double* g, double* error_bound);
/* lower bound on sup over the ball B(x0, r) of |G(x) - G_S(x)|; argmax may be NULL */
SD_API sd_status sd_sup_gap(const sd_objective* f, const sd_oracle* o, const double* x0, int d, double r, int budget,
                            uint64_t seed, int refine_starts, int refine_steps, double* value, double* argmax);

/* one-dimensional piecewise-linear convex functions given by breakpoints and slopes */
SD_API sd_status sd_pl_d1(const double* bp1, int n1, const double* sl1, const double* bp2, int n2, const double* sl2,
                          double a, double b, double* value);
SD_API sd_status sd_pl_d2(const double* bp1, int n1, const double* sl1, const double* bp2, int n2, const double* sl2,
                          double a, double b, double* value);

/* noiseless phase retrieval landscape */
SD_API sd_status sd_landscape_c(double* c);
SD_API sd_status sd_dist_to_population_Z(const double* x, const double* x_bar, int d, double* value);

/* VC quantities */
SD_API sd_status sd_vc_upper_bound(int d, int K, int* n);
SD_API sd_status sd_sign_pattern_bound(int N, int d, int K, double* bound);
SD_API sd_status sd_delta_rate(int d, double vc, double m, double delta, double* value);

/*
 * Runs an experiment ("rate-m", "rate-d", "peeling", "landscape", "verify")
 * from a JSON config and writes records.csv, fit.json and config.echo.json
 * into out_dir. When has_seed is nonzero the config seed is replaced.
 * Returns SD_ERR_ACCEPTANCE when a verify run has failing checks.
 */
SD_API sd_status sd_run_experiment(const char* kind, const char* config_path, const char* out_dir, int threads,
                                   int has_seed, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif
