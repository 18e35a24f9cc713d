#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "boxl0/baselines.hpp"
#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"
#include "boxl0/prox.hpp"

namespace boxl0 {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void finish_report(SolverReport& report, const Problem& problem, const SolverParams& params, Vector x,
                   const Vector& g, double f, int iterations, Clock::time_point start) {
  report.iterations = iterations;
  report.f_final = f;
  report.nnz = count_nonzeros(x);
  report.lambda_final = problem.lambda_target;
  if (problem.lambda_target > 0.0) {
    report.tau_final = detail::current_tau(problem.bounds, problem.lambda_target, params);
    const IndexPartition part = partition_indices(x, g, report.tau_final, problem.lambda_target, problem.bounds);
    report.residual_norm = residual_F(x, g, report.tau_final, part, problem.bounds).norm;
  }
  report.x_final = std::move(x);
  report.wall_time = seconds_since(start);
}

double relative_change(const Vector& next, const Vector& prev) {
  const double change = std::sqrt(kernels::dist_sq(next.data(), prev.data(), next.size()));
  const double norm = std::sqrt(kernels::sum_sq(next.data(), next.size()));
  return change / std::max(1.0, norm);
}

}  // namespace

double piht_step(const BoxBounds& bounds, double lambda, const SolverParams& params) {
  double t = 1.0 / params.lipschitz_estimate;
  t = std::min(t, 0.99 * bounds.a() / (2.0 * lambda));
  if (params.tau > 0.0) t = std::min(t, params.tau);
  return t;
}

double l1_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s;
}

SolverReport solve_piht(const Problem& problem, const SolverParams& params, std::span<const double> x0,
                        const IterationObserver& observer) {
  validate_problem(problem);
  const auto start = Clock::now();
  const SmoothObjective& obj = *problem.objective;
  const BoxBounds& bounds = problem.bounds;
  const double lambda0 = detail::effective_lambda0(problem, params);

  Vector x = detail::initial_point(problem, x0);
  const std::size_t n = x.size();
  Vector g(n);
  Vector g_next(n);
  double f = obj.value_and_gradient(x, g);
  IndexList prev_support;
  SolverReport report;
  int k = 0;
  for (;;) {
    const double lambda = lambda_schedule(problem.lambda_target, lambda0, params.lambda_decay, k);
    const double t = piht_step(bounds, lambda, params);
    const IndexPartition part = partition_indices(x, g, t, lambda, bounds);
    Vector x_next = pgm_step(x, g, t, lambda, bounds);
    const double f_next = obj.value_and_gradient(x_next, g_next);
    const double merit_prev = f + lambda * static_cast<double>(count_nonzeros(x));
    const double merit_next = f_next + lambda * static_cast<double>(count_nonzeros(x_next));
    if (observer) {
      observer(IterationEvent{k, lambda, t, x, g, x_next, part, prev_support, StepKind::PGM, f, f_next, merit_prev,
                              merit_next, nullptr});
    }
    report.history.push_back(
        {k, f_next, merit_next, std::sqrt(kernels::dist_sq(x_next.data(), x.data(), n)), StepKind::PGM});
    report.pgm_steps += 1;
    const double rel = relative_change(x_next, x);
    x.swap(x_next);
    g.swap(g_next);
    f = f_next;
    prev_support = part.support();
    ++k;
    if (detail::should_stop(params, {rel, f, lambda == problem.lambda_target, k})) break;
  }
  finish_report(report, problem, params, std::move(x), g, f, k, start);
  return report;
}

SolverReport solve_pga(const Problem& problem, const SolverParams& params, std::span<const double> x0,
                       const IterationObserver& observer) {
  if (!problem.objective) throw Error(ErrorCode::InvalidArgument, "problem has no objective");
  if (problem.objective->dim() != problem.bounds.size()) {
    throw Error(ErrorCode::DimensionMismatch, "objective dimension != bounds length");
  }
  if (!(problem.lambda_target >= 0.0)) throw Error(ErrorCode::NonpositiveLambda, "lambda must be >= 0");
  const auto start = Clock::now();
  const SmoothObjective& obj = *problem.objective;
  const BoxBounds& bounds = problem.bounds;
  const double lambda0 = detail::effective_lambda0(problem, params);
  const double t0 = 1.0 / params.lipschitz_estimate;

  Vector x = detail::initial_point(problem, x0);
  const std::size_t n = x.size();
  Vector g(n);
  Vector g_next(n);
  Vector z(n);
  double f = obj.value_and_gradient(x, g);
  const IndexPartition no_partition;
  const IndexList no_support;
  SolverReport report;
  int k = 0;
  for (;;) {
    const double lambda = lambda_schedule(problem.lambda_target, lambda0, params.lambda_decay, k);
    double t = t0;
    Vector x_next;
    double f_next = 0.0;
    for (int m = 0;; ++m) {
      kernels::active().grad_step(x.data(), g.data(), t, z.data(), n);
      x_next = prox_l1_box(z, t * lambda, bounds);
      // The first trial step 1/L_hat passes whenever L_hat >= L, so the gradient is rarely wasted.
      f_next = obj.value_and_gradient(x_next, g_next);
      double lin = 0.0;
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double step = x_next[i] - x[i];
        lin += g[i] * step;
        sq += step * step;
      }
      if (f_next <= f + lin + sq / (2.0 * t) || m >= params.max_backtracks) break;
      t *= 0.5;
    }
    const double merit_prev = f + lambda * l1_norm(x);
    const double merit_next = f_next + lambda * l1_norm(x_next);
    if (observer) {
      observer(IterationEvent{k, lambda, t, x, g, x_next, no_partition, no_support, StepKind::PGM, f, f_next,
                              merit_prev, merit_next, nullptr});
    }
    report.history.push_back(
        {k, f_next, merit_next, std::sqrt(kernels::dist_sq(x_next.data(), x.data(), n)), StepKind::PGM});
    report.pgm_steps += 1;
    const double rel = relative_change(x_next, x);
    x.swap(x_next);
    g.swap(g_next);
    f = f_next;
    ++k;
    if (detail::should_stop(params, {rel, f, lambda == problem.lambda_target, k})) break;
  }
  finish_report(report, problem, params, std::move(x), g, f, k, start);
  report.tau_final = t0;
  return report;
}

}  // namespace boxl0
