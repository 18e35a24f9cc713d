#pragma once

#include <span>

#include "boxl0/model.hpp"

namespace boxl0 {

// Componentwise clamp to [-lower, upper].
Vector box_project(std::span<const double> z, const BoxBounds& bounds);

// argmin_y 1/2|y - z|^2 + tau_lambda |y|_0 over the box, in closed form:
//   z_i      if -l_i < z_i < u_i and |z_i| >= sqrt(2 tau_lambda)
//   u_i      if z_i >= u_i
//   -l_i     if z_i <= -l_i
//   0        otherwise
// On the tie |z_i| = sqrt(2 tau_lambda) both z_i and 0 are minimizers; z_i is
// returned so the result agrees with the inclusive Theta index set.
// Throws ThresholdTooLarge unless 2 tau_lambda < a.
Vector prox_l0_box(std::span<const double> z, double tau_lambda, const BoxBounds& bounds);

// clamp(soft_threshold(z, tau_lambda)); exact because the box contains 0.
Vector prox_l1_box(std::span<const double> z, double tau_lambda, const BoxBounds& bounds);

// Brute-force minimizer of h(y) = 1/2 (y - z)^2 + tau_lambda [y != 0] over the
// grid {-l, -l + step, ..., u} plus the points 0 and clamp(z). Ties go to the
// larger |y|. Test oracle only.
double prox_oracle_1d(double z, double tau_lambda, double lower, double upper, double grid_step);

// The 1-D objective minimized by the oracle (infinite outside the box).
double prox_objective_1d(double y, double z, double tau_lambda, double lower, double upper);

}  // namespace boxl0
