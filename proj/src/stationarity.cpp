#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"
#include "boxl0/prox.hpp"
#include "boxl0/stationarity.hpp"

namespace boxl0 {
namespace {

IndexList merge_sorted(const IndexList& a, const IndexList& b) {
  IndexList out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

IndexList IndexPartition::support() const { return merge_sorted(theta, gamma()); }

IndexList IndexPartition::gamma() const { return merge_sorted(gamma_u, gamma_l); }

double l0_threshold(double tau, double lambda) { return std::sqrt(2.0 * (tau * lambda)); }

IndexPartition partition_indices(std::span<const double> x, std::span<const double> g, double tau,
                                 double lambda, const BoxBounds& bounds) {
  const std::size_t n = x.size();
  if (g.size() != n || bounds.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "partition: x, g and bounds lengths differ");
  }
  if (!(2.0 * (tau * lambda) < bounds.a())) {
    throw Error(ErrorCode::ThresholdTooLarge,
                "2*tau*lambda = " + std::to_string(2.0 * tau * lambda) + " >= a = " + std::to_string(bounds.a()));
  }
  Vector z(n);
  kernels::active().grad_step(x.data(), g.data(), tau, z.data(), n);
  const double thr = l0_threshold(tau, lambda);
  const auto lo = bounds.lower();
  const auto up = bounds.upper();

  IndexPartition p;
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] >= up[i]) {
      p.gamma_u.push_back(i);
    } else if (z[i] <= -lo[i]) {
      p.gamma_l.push_back(i);
    } else if (std::fabs(z[i]) >= thr) {
      p.theta.push_back(i);
    } else {
      p.ibar.push_back(i);
    }
  }
  return p;
}

ResidualF residual_F(std::span<const double> x, std::span<const double> g, double tau,
                     const IndexPartition& partition, const BoxBounds& bounds) {
  ResidualF r;
  r.theta_part.reserve(partition.theta.size());
  for (std::size_t i : partition.theta) r.theta_part.push_back(g[i]);

  const auto lo = bounds.lower();
  const auto up = bounds.upper();
  for (std::size_t i : partition.gamma()) {
    const double t = tau * g[i];
    const double zi = x[i] - t;
    const double proj = std::min(std::max(zi, -lo[i]), up[i]);
    r.gamma_part.push_back(x[i] - proj);
  }
  r.ibar_part.reserve(partition.ibar.size());
  for (std::size_t i : partition.ibar) r.ibar_part.push_back(x[i]);

  const double sq = kernels::sum_sq(r.theta_part.data(), r.theta_part.size()) +
                    kernels::sum_sq(r.gamma_part.data(), r.gamma_part.size()) +
                    kernels::sum_sq(r.ibar_part.data(), r.ibar_part.size());
  r.norm = std::sqrt(sq);
  return r;
}

bool check_tau_stationary(std::span<const double> x, std::span<const double> g, double tau,
                          double lambda, const BoxBounds& bounds, double tol) {
  if (x.size() != bounds.size() || g.size() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch, "stationarity check: lengths differ");
  }
  if (!bounds.contains(x, tol)) throw Error(ErrorCode::InfeasiblePoint, "x is outside the box");
  const double thr = l0_threshold(tau, lambda);
  const double zero_gate = std::sqrt(2.0 * lambda / tau);
  const auto lo = bounds.lower();
  const auto up = bounds.upper();
  for (std::size_t i = 0; i < x.size(); ++i) {
    bool ok;
    if (std::fabs(x[i] - up[i]) <= tol) {
      ok = g[i] <= tol;
    } else if (std::fabs(x[i] + lo[i]) <= tol) {
      ok = g[i] >= -tol;
    } else if (std::fabs(x[i]) <= tol) {
      ok = std::fabs(g[i]) <= zero_gate + tol;
    } else if (std::fabs(x[i]) >= thr - tol) {
      ok = std::fabs(g[i]) <= tol;
    } else {
      ok = false;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace boxl0
