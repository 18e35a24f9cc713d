#include <cmath>
#include <limits>
#include <string>

#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"
#include "boxl0/prox.hpp"

namespace boxl0 {
namespace {

void check_length(std::span<const double> z, const BoxBounds& bounds) {
  if (z.size() != bounds.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(z.size()) + " != bounds length " +
                    std::to_string(bounds.size()));
  }
}

}  // namespace

Vector box_project(std::span<const double> z, const BoxBounds& bounds) {
  check_length(z, bounds);
  Vector out(z.size());
  kernels::active().clamp_box(z.data(), bounds.lower().data(), bounds.upper().data(), out.data(),
                              z.size());
  return out;
}

Vector prox_l0_box(std::span<const double> z, double tau_lambda, const BoxBounds& bounds) {
  check_length(z, bounds);
  if (!(2.0 * tau_lambda < bounds.a())) {
    throw Error(ErrorCode::ThresholdTooLarge,
                "2*tau*lambda = " + std::to_string(2.0 * tau_lambda) + " >= a = " + std::to_string(bounds.a()));
  }
  Vector out(z.size());
  kernels::active().hard_threshold_box(z.data(), std::sqrt(2.0 * tau_lambda), bounds.lower().data(),
                                       bounds.upper().data(), out.data(), z.size());
  return out;
}

Vector prox_l1_box(std::span<const double> z, double tau_lambda, const BoxBounds& bounds) {
  check_length(z, bounds);
  if (!(tau_lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l1 shrinkage must be >= 0");
  Vector out(z.size());
  kernels::active().soft_threshold_box(z.data(), tau_lambda, bounds.lower().data(), bounds.upper().data(),
                                       out.data(), z.size());
  return out;
}

double prox_objective_1d(double y, double z, double tau_lambda, double lower, double upper) {
  if (y < -lower || y > upper) return std::numeric_limits<double>::infinity();
  const double d = y - z;
  return 0.5 * d * d + (y != 0.0 ? tau_lambda : 0.0);
}

double prox_oracle_1d(double z, double tau_lambda, double lower, double upper, double grid_step) {
  if (!(grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be > 0");
  double best_y = 0.0;
  double best_h = prox_objective_1d(0.0, z, tau_lambda, lower, upper);
  auto consider = [&](double y) {
    const double h = prox_objective_1d(y, z, tau_lambda, lower, upper);
    if (h < best_h || (h == best_h && std::fabs(y) > std::fabs(best_y))) {
      best_h = h;
      best_y = y;
    }
  };
  const auto steps = static_cast<long long>(std::floor((upper + lower) / grid_step));
  for (long long k = 0; k <= steps; ++k) consider(-lower + static_cast<double>(k) * grid_step);
  consider(upper);
  consider(std::min(std::max(z, -lower), upper));
  return best_y;
}

}  // namespace boxl0
