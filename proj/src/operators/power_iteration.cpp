#include <cmath>
#include <random>

#include "boxl0/kernels.hpp"
#include "boxl0/operators.hpp"

namespace boxl0 {

double power_iteration(const LinearMap& map, int iters, std::uint64_t seed) {
  const std::size_t n = map.cols();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& e : v) e = normal(rng);
  double norm = std::sqrt(kernels::sum_sq(v.data(), n));
  for (auto& e : v) e /= norm;

  Vector av(map.rows());
  Vector w(n);
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    map.apply_into(v, av);
    map.adjoint_into(av, w);
    // <v, A^T A v> with |v| = 1
    estimate = kernels::dot(v.data(), w.data(), n);
    norm = std::sqrt(kernels::sum_sq(w.data(), n));
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return estimate;
}

}  // namespace boxl0
