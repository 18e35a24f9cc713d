#include <algorithm>
#include <cmath>
#include <string>

#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"
#include "boxl0/model.hpp"

namespace boxl0 {

BoxBounds::BoxBounds(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "lower bound length " + std::to_string(lower_.size()) + " != upper bound length " +
                    std::to_string(upper_.size()));
  }
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] > 0.0) || !(upper_[i] > 0.0)) {
      throw Error(ErrorCode::NonpositiveBound, "bound entry " + std::to_string(i) + " is not > 0");
    }
    a = std::min({a, lower_[i] * lower_[i], upper_[i] * upper_[i]});
  }
  a_ = lower_.empty() ? 0.0 : a;
}

BoxBounds BoxBounds::uniform(std::size_t n, double lower, double upper) {
  return BoxBounds(Vector(n, lower), Vector(n, upper));
}

bool BoxBounds::contains(std::span<const double> x, double tol) const {
  if (x.size() != size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < -lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

double SmoothObjective::value_and_gradient(std::span<const double> x, std::span<double> g) const {
  gradient_into(x, g);
  return value(x);
}

Vector SmoothObjective::gradient(std::span<const double> x) const {
  Vector g(dim());
  gradient_into(x, g);
  return g;
}

LeastSquaresObjective::LeastSquaresObjective(MapPtr map, Vector observation)
    : map_(std::move(map)), b_(std::move(observation)) {
  if (!map_) throw Error(ErrorCode::InvalidArgument, "null map");
  if (b_.size() != map_->rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "observation length " + std::to_string(b_.size()) + " != map rows " +
                    std::to_string(map_->rows()));
  }
}

namespace {
Vector interleave(std::span<const std::complex<double>> c) {
  Vector out(2 * c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    out[2 * j] = c[j].real();
    out[2 * j + 1] = c[j].imag();
  }
  return out;
}
}  // namespace

LeastSquaresObjective::LeastSquaresObjective(MapPtr map, std::span<const std::complex<double>> observation)
    : LeastSquaresObjective(std::move(map), interleave(observation)) {}

Vector LeastSquaresObjective::residual(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "x length " + std::to_string(x.size()) + " != " + std::to_string(dim()));
  }
  Vector r(map_->rows());
  map_->apply_into(x, r);
  kernels::axpy(-1.0, b_.data(), r.data(), r.size());
  return r;
}

double LeastSquaresObjective::value(std::span<const double> x) const {
  const Vector r = residual(x);
  return 0.5 * kernels::sum_sq(r.data(), r.size());
}

void LeastSquaresObjective::gradient_into(std::span<const double> x, std::span<double> g) const {
  const Vector r = residual(x);
  map_->adjoint_into(r, g);
}

double LeastSquaresObjective::value_and_gradient(std::span<const double> x, std::span<double> g) const {
  const Vector r = residual(x);
  map_->adjoint_into(r, g);
  return 0.5 * kernels::sum_sq(r.data(), r.size());
}

Eigen::MatrixXd LeastSquaresObjective::hessian_block(std::span<const double> /*x*/,
                                                     std::span<const std::size_t> rows,
                                                     std::span<const std::size_t> cols) const {
  const std::size_t n = dim();
  const std::size_t m = map_->rows();
  IndexList needed(rows.begin(), rows.end());
  needed.insert(needed.end(), cols.begin(), cols.end());
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  if (!needed.empty() && needed.back() >= n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "Hessian index " + std::to_string(needed.back()) + " >= " + std::to_string(n));
  }

  // Columns of A: borrowed when the map stores them, materialized otherwise.
  std::vector<Vector> owned;
  std::vector<const double*> ptr(needed.size());
  for (std::size_t k = 0; k < needed.size(); ++k) {
    ptr[k] = map_->column_data(needed[k]);
    if (ptr[k] == nullptr) {
      owned.emplace_back(m);
      map_->column_into(needed[k], owned.back());
      ptr[k] = owned.back().data();
    }
  }
  auto lookup = [&](std::size_t idx) {
    return ptr[static_cast<std::size_t>(std::lower_bound(needed.begin(), needed.end(), idx) - needed.begin())];
  };

  const auto& kt = kernels::active();
  Eigen::MatrixXd h(rows.size(), cols.size());
  const bool same = std::equal(rows.begin(), rows.end(), cols.begin(), cols.end());
  for (std::size_t p = 0; p < rows.size(); ++p) {
    const double* rp = lookup(rows[p]);
    for (std::size_t q = same ? p : 0; q < cols.size(); ++q) {
      const double v = kt.dot(rp, lookup(cols[q]), m);
      h(p, q) = v;
      if (same) h(q, p) = v;
    }
  }
  return h;
}

void LeastSquaresObjective::hessian_apply(std::span<const double> /*x*/, std::span<const double> v,
                                          std::span<double> out) const {
  Vector av(map_->rows());
  map_->apply_into(v, av);
  map_->adjoint_into(av, out);
}

void validate_problem(const Problem& problem) {
  if (!problem.objective) throw Error(ErrorCode::InvalidArgument, "problem has no objective");
  if (problem.objective->dim() != problem.bounds.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "objective dimension " + std::to_string(problem.objective->dim()) +
                    " != bounds length " + std::to_string(problem.bounds.size()));
  }
  const auto lo = problem.bounds.lower();
  const auto up = problem.bounds.upper();
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] > 0.0) || !(up[i] > 0.0)) {
      throw Error(ErrorCode::NonpositiveBound, "bound entry " + std::to_string(i) + " is not > 0");
    }
  }
  if (!(problem.lambda_target > 0.0)) {
    throw Error(ErrorCode::NonpositiveLambda, "lambda must be > 0");
  }
}

const char* to_string(StepKind kind) { return kind == StepKind::Newton ? "newton" : "pgm"; }

double compute_alpha_bar(double lipschitz, double delta, double sigma) {
  const double first = (1.0 - 2.0 * sigma) / (lipschitz / delta - sigma);
  const double second = 2.0 * (1.0 - sigma) * delta / lipschitz;
  double alpha = std::min({second, 1.0});
  // L/delta <= sigma makes the first term negative or undefined; it does not bind then.
  if (lipschitz / delta > sigma) alpha = std::min(alpha, first);
  return alpha;
}

void SolverParams::recompute_alpha_bar() { alpha_bar = compute_alpha_bar(lipschitz_estimate, delta, sigma); }

std::size_t count_nonzeros(std::span<const double> x) {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }));
}

}  // namespace boxl0
