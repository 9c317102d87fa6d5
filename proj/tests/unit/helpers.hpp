#ifndef SUBDIFF_TEST_HELPERS_HPP
#define SUBDIFF_TEST_HELPERS_HPP

#include "subdiff/set_calculus.hpp"

#include <random>
#include <vector>

namespace th {

using subdiff::ConvexBody;
using subdiff::Rng;
using subdiff::Vector;

inline Vector gauss(Rng& rng, int d, double s = 1.0) {
  std::normal_distribution<double> nd(0.0, s);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = nd(rng);
  return v;
}

inline ConvexBody rand_zonotope(Rng& rng, int d, int k) {
  std::vector<Vector> g;
  for (int i = 0; i < k; ++i) g.push_back(gauss(rng, d, 0.5));
  return ConvexBody::zonotope(gauss(rng, d, 0.5), g);
}

inline ConvexBody rand_vpoly(Rng& rng, int d, int n) {
  std::vector<Vector> p;
  for (int i = 0; i < n; ++i) p.push_back(gauss(rng, d));
  return ConvexBody::vpolytope(p);
}

inline ConvexBody rand_body(Rng& rng, int d, int maxk) {
  std::uniform_int_distribution<int> k(1, maxk);
  return rng() % 2 ? rand_zonotope(rng, d, k(rng)) : rand_vpoly(rng, d, k(rng));
}

}  // namespace th

#endif
