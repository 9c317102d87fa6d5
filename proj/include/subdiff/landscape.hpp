#ifndef SUBDIFF_LANDSCAPE_HPP
#define SUBDIFF_LANDSCAPE_HPP

// Noiseless phase retrieval landscape: the population stationary set
// Z = {0} u {+-xb} u {x perp xb : |x| = c |xb|}, empirical stationary points
// and the deviation D(Z_S, Z).

#include "subdiff/subgradient_maps.hpp"

#include <vector>

namespace subdiff {

// c/(1+c^2) + arctan(c) - pi/4
double c_equation(double c);
// Root of c_equation by bisection on [0, 1]; |residual| < 1e-12.
double solve_c_constant();

struct PopulationStationarySet {
  Vector x_bar;
  double c = 0.0;
  double rho = 0.0;  // ring radius c |xb|
};
PopulationStationarySet population_stationary_set(const Vector& x_bar);

double dist_to_population_Z(const Vector& x, const Vector& x_bar);

enum class StationaryMode {
  descent,  // x <- x - gamma G_S(x)
  saddle,   // x <- x - gamma R G_S(x), R reflects the xb component
};

struct StationaryConfig {
  Vector x_bar;                 // required
  StationaryMode mode = StationaryMode::descent;
  double tol = -1.0;            // < 0: 1e-3 |xb| mean |a_i|^2
  double gamma0 = -1.0;         // < 0: 0.1 |xb|
  int iterations = 10000;
  int stagnation_iterations = 5000;
  double stagnation_decay = 0.999;
  bool polish = true;           // active-set Newton solve on nearby kinks
  int polish_candidates = -1;   // < 0: d + 2 nearest kink surfaces
  double polish_radius = 0.05;  // relative to |xb|
  int threads = 1;
};

struct StationaryPointReport {
  Vector x;
  double residual = 0.0;  // dist(0, df_S(x))
  int iterations = 0;
  int start_index = 0;
  double dist_to_Z = 0.0;
  bool success = false;   // residual <= tol
};

double default_stationary_tol(const EmpiricalObjective& obj, const Vector& x_bar);
double stationarity_residual(const EmpiricalObjective& obj, const Vector& x);

// Requires a phase retrieval objective with the abs loss.
std::vector<StationaryPointReport> find_stationary_points(const EmpiricalObjective& obj,
                                                          const std::vector<Vector>& starts,
                                                          const StationaryConfig& cfg);

// Successful terminals merged greedily within merge_radius (start order).
std::vector<Vector> cluster_terminals(const std::vector<StationaryPointReport>& reports, double merge_radius);
// max over clustered successful terminals of dist_to_population_Z.
double deviation_ZS_to_Z(const std::vector<StationaryPointReport>& reports, const Vector& x_bar,
                         double merge_radius = 0.0);

}  // namespace subdiff

#endif
