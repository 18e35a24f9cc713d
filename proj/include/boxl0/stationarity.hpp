#pragma once

#include <span>

#include "boxl0/model.hpp"

namespace boxl0 {

// Index sets at a point, from the trial point z = x - tau g:
//   theta   : -l < z < u and |z| >= sqrt(2 tau lambda)   (inactive, Newton subspace)
//   gamma_u : z >= u                                      (active at the upper bound)
//   gamma_l : z <= -l                                     (active at the lower bound)
//   ibar    : everything else                             (forced to zero)
// All four are sorted and partition {0, ..., n-1}.
struct IndexPartition {
  IndexList theta;
  IndexList gamma_u;
  IndexList gamma_l;
  IndexList ibar;

  // theta U gamma_u U gamma_l, sorted.
  IndexList support() const;
  // gamma_u U gamma_l, sorted.
  IndexList gamma() const;
  std::size_t dim() const { return theta.size() + gamma_u.size() + gamma_l.size() + ibar.size(); }
};

// Stationarity residual blocks: [grad_theta f; x_gamma - P(x - tau g)_gamma; x_ibar].
struct ResidualF {
  Vector theta_part;
  Vector gamma_part;
  Vector ibar_part;
  double norm = 0.0;
};

// sqrt(2 tau lambda), evaluated the same way as the prox threshold.
double l0_threshold(double tau, double lambda);

// Throws ThresholdTooLarge unless 2 tau lambda < a.
IndexPartition partition_indices(std::span<const double> x, std::span<const double> g, double tau,
                                 double lambda, const BoxBounds& bounds);

// gamma_part is ordered like partition.gamma().
ResidualF residual_F(std::span<const double> x, std::span<const double> g, double tau,
                     const IndexPartition& partition, const BoxBounds& bounds);

// Componentwise tau-stationarity test:
//   at u_i               : g_i <= tol
//   at -l_i              : g_i >= -tol
//   zero                 : |g_i| <= sqrt(2 lambda / tau) + tol
//   |x_i| >= threshold   : |g_i| <= tol
// Any other component fails. Throws InfeasiblePoint if x leaves the box by more than tol.
bool check_tau_stationary(std::span<const double> x, std::span<const double> g, double tau,
                          double lambda, const BoxBounds& bounds, double tol = 1e-8);

}  // namespace boxl0
