#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "boxl0/model.hpp"
#include "boxl0/stationarity.hpp"

namespace boxl0 {

// Search direction d^k. For both step kinds d_ibar = -x_ibar.
struct DirectionBundle {
  Vector d;
  StepKind kind = StepKind::Newton;
  bool solvable = true;

  Vector block(std::span<const std::size_t> index) const;
};

// Per-solve working state.
struct IterateState {
  Vector x;
  Vector grad;
  IndexPartition partition;
  IndexList prev_support;
  int k = 0;
  double f_val = 0.0;
  double phi_val = 0.0;
  StepKind last_step = StepKind::PGM;
};

struct IterationEvent {
  int k;
  double lambda;
  double tau;
  const Vector& x_prev;
  const Vector& grad_prev;
  const Vector& x_next;
  const IndexPartition& partition;  // empty for the l1 baseline
  const IndexList& prev_support;
  StepKind kind;
  double f_prev;
  double f_next;
  double merit_prev;  // f + lambda * penalty, both at the same lambda
  double merit_next;
  const DirectionBundle* newton;  // set when the Newton step was taken
};

using IterationObserver = std::function<void(const IterationEvent&)>;

// Power iteration on the Hessian at 0 (exact for least squares).
double estimate_lipschitz(const SmoothObjective& objective, int iters, std::uint64_t seed);

// min(0.99 a / (2 lambda), 1 / (4 L_hat))
double select_tau(const BoxBounds& bounds, double lambda, double lipschitz);

// max(target, lambda0 * decay^k)
double lambda_schedule(double lambda_target, double lambda0, double decay, int k);

// max_i (tau_ref / 2) |grad_i f(0)|^2 with tau_ref = min(1/(4 L_hat), a / (2 max_i |grad_i f(0)|)).
double lambda_upper(const SmoothObjective& objective, const BoxBounds& bounds, double lipschitz);

// Defaults for a problem: L_hat from power iteration (times `lipschitz_margin`),
// lambda0 = max(lambda_target, lambda_upper / 2), alpha_bar from (L_hat, delta, sigma).
SolverParams default_params(const Problem& problem, int power_iters = 60, std::uint64_t seed = 1,
                            double lipschitz_margin = 1.05);

// d over gamma(), in that order: u_i - x_i on gamma_u, -l_i - x_i on gamma_l.
Vector gamma_direction(std::span<const double> x, const IndexPartition& partition, const BoxBounds& bounds);

// Subspace Newton direction. std::nullopt when theta exceeds the Hessian rank bound
// or the theta-block Hessian has a
// pivot below 1e-12 times its largest diagonal magnitude.
std::optional<DirectionBundle> newton_direction(const SmoothObjective& objective, std::span<const double> x,
                                                std::span<const double> g, const IndexPartition& partition,
                                                const BoxBounds& bounds);

// Strict mode checks the four original conditions; the default checks the
// relaxed pair plus feasibility of x + d and the index-history condition.
bool accept_newton(const DirectionBundle& bundle, std::span<const double> x, std::span<const double> g,
                   const IndexPartition& partition, const IndexList& prev_support, const SolverParams& params,
                   double tau, double lambda, const BoxBounds& bounds);

struct ArmijoResult {
  double alpha;
  int backtracks;
  Vector x;
  double f;
};

// Smallest m <= max_backtracks with f(x(beta^m)) <= f(x) + sigma beta^m <g, d>, where
// only the theta block is scaled by the step length.
std::optional<ArmijoResult> armijo_search(const SmoothObjective& objective, std::span<const double> x,
                                          std::span<const double> g, double f_x, const DirectionBundle& bundle,
                                          const IndexPartition& partition, const SolverParams& params,
                                          const BoxBounds& bounds);

// prox_l0_box(x - tau g, tau lambda)
Vector pgm_step(std::span<const double> x, std::span<const double> g, double tau, double lambda,
                const BoxBounds& bounds);

// <d, H d> over the full index set and over support U (prev_support \ support),
// where H has Hessian rows on theta and identity rows elsewhere.
struct QuadraticForms {
  double full;
  double reduced;
};
QuadraticForms newton_quadratic_forms(const SmoothObjective& objective, std::span<const double> x,
                                      const DirectionBundle& bundle, const IndexPartition& partition,
                                      const IndexList& prev_support);

// Subspace Newton method with PGM fallback, Armijo search and lambda homotopy.
// An empty x0 means the zero vector.
SolverReport solve_bnl0r(const Problem& problem, const SolverParams& params, std::span<const double> x0 = {},
                         const IterationObserver& observer = {});

namespace detail {

struct StopState {
  double rel_change;
  double f;
  bool at_target;
  int iterations;
};

bool should_stop(const SolverParams& params, const StopState& s);

// min(select_tau(...), cap) with cap ignored when <= 0.
double current_tau(const BoxBounds& bounds, double lambda, const SolverParams& params);

Vector initial_point(const Problem& problem, std::span<const double> x0);

double effective_lambda0(const Problem& problem, const SolverParams& params);

}  // namespace detail

}  // namespace boxl0
