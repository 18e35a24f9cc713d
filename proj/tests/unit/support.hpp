#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "boxl0/model.hpp"

namespace boxl0::testing {

using Rng = std::mt19937_64;

inline Vector gaussian(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& e : v) e = normal(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::shared_ptr<DenseMap> gaussian_map(std::size_t rows, std::size_t cols, Rng& rng) {
  return std::make_shared<DenseMap>(rows, cols, gaussian(rows * cols, rng));
}

inline Eigen::MatrixXd to_eigen(const DenseMap& map) {
  Eigen::MatrixXd m(map.rows(), map.cols());
  for (std::size_t c = 0; c < map.cols(); ++c)
    for (std::size_t r = 0; r < map.rows(); ++r) m(r, c) = map(r, c);
  return m;
}

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

// Least squares with a tall Gaussian matrix (strongly convex) and random box.
struct RandomQuadratic {
  std::shared_ptr<DenseMap> map;
  Problem problem;
};

inline RandomQuadratic random_quadratic(std::size_t n, Rng& rng, double lambda = 0.05) {
  const std::size_t m = 2 * n + 5;
  auto map = gaussian_map(m, n, rng);
  Vector b = gaussian(m, rng);
  for (auto& v : b) v *= 2.0;
  Vector lo(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = uniform(rng, 0.5, 2.0);
    up[i] = uniform(rng, 0.5, 2.0);
  }
  auto obj = std::make_shared<LeastSquaresObjective>(map, b);
  return {map, Problem{obj, BoxBounds(lo, up), lambda}};
}

}  // namespace boxl0::testing
