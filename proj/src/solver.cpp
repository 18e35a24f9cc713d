#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>
#include <random>
#include <string>

#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"
#include "boxl0/prox.hpp"
#include "boxl0/solver.hpp"

namespace boxl0 {

Vector DirectionBundle::block(std::span<const std::size_t> index) const {
  Vector out;
  out.reserve(index.size());
  for (std::size_t i : index) out.push_back(d[i]);
  return out;
}

double estimate_lipschitz(const SmoothObjective& objective, int iters, std::uint64_t seed) {
  if (iters < 10) throw Error(ErrorCode::InvalidArgument, "power iteration needs at least 10 steps");
  if (const auto* ls = dynamic_cast<const LeastSquaresObjective*>(&objective)) {
    return power_iteration(ls->map(), iters, seed);
  }
  const std::size_t n = objective.dim();
  const Vector zero(n, 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& e : v) e = normal(rng);
  double norm = std::sqrt(kernels::sum_sq(v.data(), n));
  for (auto& e : v) e /= norm;
  Vector w(n);
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    objective.hessian_apply(zero, v, w);
    estimate = kernels::dot(v.data(), w.data(), n);
    norm = std::sqrt(kernels::sum_sq(w.data(), n));
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return estimate;
}

double select_tau(const BoxBounds& bounds, double lambda, double lipschitz) {
  return std::min(0.99 * bounds.a() / (2.0 * lambda), 1.0 / (4.0 * lipschitz));
}

double lambda_schedule(double lambda_target, double lambda0, double decay, int k) {
  return std::max(lambda_target, lambda0 * std::pow(decay, k));
}

double lambda_upper(const SmoothObjective& objective, const BoxBounds& bounds, double lipschitz) {
  const Vector zero(objective.dim(), 0.0);
  const Vector g0 = objective.gradient(zero);
  double gmax = 0.0;
  for (double v : g0) gmax = std::max(gmax, std::fabs(v));
  if (gmax == 0.0) return 0.0;
  const double tau_ref = std::min(1.0 / (4.0 * lipschitz), bounds.a() / (2.0 * gmax));
  return 0.5 * tau_ref * gmax * gmax;
}

SolverParams default_params(const Problem& problem, int power_iters, std::uint64_t seed,
                            double lipschitz_margin) {
  validate_problem(problem);
  SolverParams p;
  p.lipschitz_estimate = lipschitz_margin * estimate_lipschitz(*problem.objective, power_iters, seed);
  if (!(p.lipschitz_estimate > 0.0)) p.lipschitz_estimate = 1.0;
  const double upper = lambda_upper(*problem.objective, problem.bounds, p.lipschitz_estimate);
  p.lambda0 = std::max(problem.lambda_target, 0.5 * upper);
  p.recompute_alpha_bar();
  return p;
}

Vector gamma_direction(std::span<const double> x, const IndexPartition& partition, const BoxBounds& bounds) {
  const auto lo = bounds.lower();
  const auto up = bounds.upper();
  const IndexList gamma = partition.gamma();
  Vector d;
  d.reserve(gamma.size());
  for (std::size_t i : gamma) {
    const bool at_upper = std::binary_search(partition.gamma_u.begin(), partition.gamma_u.end(), i);
    d.push_back(at_upper ? up[i] - x[i] : -lo[i] - x[i]);
  }
  return d;
}

std::optional<DirectionBundle> newton_direction(const SmoothObjective& objective, std::span<const double> x,
                                                std::span<const double> g, const IndexPartition& partition,
                                                const BoxBounds& bounds) {
  const std::size_t n = x.size();
  DirectionBundle bundle;
  bundle.kind = StepKind::Newton;
  bundle.d.assign(n, 0.0);

  const IndexList gamma = partition.gamma();
  const Vector d_gamma = gamma_direction(x, partition, bounds);
  // Columns coupled to theta through the Hessian: gamma and the nonzero part of ibar.
  IndexList coupled;
  Vector d_coupled;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    bundle.d[gamma[k]] = d_gamma[k];
    if (d_gamma[k] != 0.0) {
      coupled.push_back(gamma[k]);
      d_coupled.push_back(d_gamma[k]);
    }
  }
  for (std::size_t i : partition.ibar) {
    if (x[i] != 0.0) {
      bundle.d[i] = -x[i];
      coupled.push_back(i);
      d_coupled.push_back(-x[i]);
    }
  }

  const IndexList& theta = partition.theta;
  if (theta.empty()) return bundle;
  if (theta.size() > objective.hessian_rank_bound()) return std::nullopt;

  Eigen::VectorXd rhs(theta.size());
  for (std::size_t p = 0; p < theta.size(); ++p) rhs[p] = -g[theta[p]];
  if (!coupled.empty()) {
    // hessian_block expects sorted, distinct lists only for efficiency; order is kept.
    const Eigen::MatrixXd hc = objective.hessian_block(x, theta, coupled);
    rhs -= hc * Eigen::Map<const Eigen::VectorXd>(d_coupled.data(), static_cast<Eigen::Index>(d_coupled.size()));
  }
  const Eigen::MatrixXd h = objective.hessian_block(x, theta, theta);
  const double max_diag = h.diagonal().cwiseAbs().maxCoeff();
  if (!(max_diag > 0.0)) return std::nullopt;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  if (ldlt.vectorD().cwiseAbs().minCoeff() < 1e-12 * max_diag) return std::nullopt;
  const Eigen::VectorXd d_theta = ldlt.solve(rhs);
  if (!d_theta.allFinite()) return std::nullopt;
  for (std::size_t p = 0; p < theta.size(); ++p) bundle.d[theta[p]] = d_theta[static_cast<Eigen::Index>(p)];
  return bundle;
}

namespace {

// x + d with the gamma entries pinned to their bound and ibar set to zero.
Vector full_step_point(std::span<const double> x, const DirectionBundle& bundle, const IndexPartition& partition,
                       const BoxBounds& bounds) {
  Vector y(x.size(), 0.0);
  for (std::size_t i : partition.theta) y[i] = x[i] + bundle.d[i];
  for (std::size_t i : partition.gamma_u) y[i] = bounds.upper()[i];
  for (std::size_t i : partition.gamma_l) y[i] = -bounds.lower()[i];
  return y;
}

}  // namespace

bool accept_newton(const DirectionBundle& bundle, std::span<const double> x, std::span<const double> g,
                   const IndexPartition& partition, const IndexList& prev_support, const SolverParams& params,
                   double tau, double lambda, const BoxBounds& bounds) {
  const std::size_t n = x.size();
  const IndexList support = partition.support();

  double g_d_support = 0.0;
  for (std::size_t i : support) g_d_support += g[i] * bundle.d[i];
  const double g_d = kernels::dot(g.data(), bundle.d.data(), n);
  const double d_sq = kernels::sum_sq(bundle.d.data(), n);
  double x_ibar_sq = 0.0;
  for (std::size_t i : partition.ibar) x_ibar_sq += x[i] * x[i];
  const double slack = -params.delta * d_sq + x_ibar_sq / (4.0 * tau);
  const auto support_size = static_cast<double>(support.size());
  const auto nnz = static_cast<double>(count_nonzeros(x));

  bool descent;
  bool sparsity;
  if (params.strict_acceptance) {
    descent = g_d_support <= slack;
    sparsity = support_size <= nnz;
  } else {
    descent = 2.0 * g_d_support <= slack;
    const double scaled = params.sigma * params.beta * params.alpha_bar * g_d;
    sparsity = scaled + lambda * (support_size - nnz) <= 0.5 * scaled;
  }
  if (!descent || !sparsity) return false;

  // x + d must stay in the box; gamma and ibar entries land on the bound or 0 by construction.
  const auto lo = bounds.lower();
  const auto up = bounds.upper();
  for (std::size_t i : partition.theta) {
    const double v = x[i] + bundle.d[i];
    if (v < -lo[i] || v > up[i]) return false;
  }

  // theta \ prev_support nonempty, or support == prev_support.
  IndexList fresh;
  std::set_difference(partition.theta.begin(), partition.theta.end(), prev_support.begin(), prev_support.end(),
                      std::back_inserter(fresh));
  return !fresh.empty() || support == prev_support;
}

std::optional<ArmijoResult> armijo_search(const SmoothObjective& objective, std::span<const double> x,
                                          std::span<const double> g, double f_x, const DirectionBundle& bundle,
                                          const IndexPartition& partition, const SolverParams& params,
                                          const BoxBounds& bounds) {
  const double g_d = kernels::dot(g.data(), bundle.d.data(), x.size());
  Vector trial = full_step_point(x, bundle, partition, bounds);
  const auto lo = bounds.lower();
  const auto up = bounds.upper();
  double alpha = 1.0;
  for (int m = 0; m <= params.max_backtracks; ++m) {
    for (std::size_t i : partition.theta) {
      // Feasible for every alpha in [0, 1] once x + d is; the clamp only absorbs rounding.
      trial[i] = std::min(std::max(x[i] + alpha * bundle.d[i], -lo[i]), up[i]);
    }
    const double f_trial = objective.value(trial);
    if (f_trial <= f_x + params.sigma * alpha * g_d) return ArmijoResult{alpha, m, std::move(trial), f_trial};
    alpha *= params.beta;
  }
  return std::nullopt;
}

Vector pgm_step(std::span<const double> x, std::span<const double> g, double tau, double lambda,
                const BoxBounds& bounds) {
  Vector z(x.size());
  kernels::active().grad_step(x.data(), g.data(), tau, z.data(), x.size());
  return prox_l0_box(z, tau * lambda, bounds);
}

QuadraticForms newton_quadratic_forms(const SmoothObjective& objective, std::span<const double> x,
                                      const DirectionBundle& bundle, const IndexPartition& partition,
                                      const IndexList& prev_support) {
  const std::size_t n = x.size();
  const IndexList& theta = partition.theta;
  const IndexList support = partition.support();
  const IndexList gamma = partition.gamma();

  // Full space: Hessian rows on theta against every column, identity rows elsewhere.
  IndexList all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const Eigen::MatrixXd h_full = objective.hessian_block(x, theta, all);
  const Eigen::Map<const Eigen::VectorXd> d(bundle.d.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd top = h_full * d;
  double full = 0.0;
  for (std::size_t p = 0; p < theta.size(); ++p) full += bundle.d[theta[p]] * top[static_cast<Eigen::Index>(p)];
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::binary_search(theta.begin(), theta.end(), i)) full += bundle.d[i] * bundle.d[i];
  }

  // Reduced: K = support U J with J = prev_support \ support.
  IndexList j_set;
  std::set_difference(prev_support.begin(), prev_support.end(), support.begin(), support.end(),
                      std::back_inserter(j_set));
  IndexList k_set;
  std::set_union(support.begin(), support.end(), j_set.begin(), j_set.end(), std::back_inserter(k_set));
  const Eigen::MatrixXd h_red = objective.hessian_block(x, theta, k_set);
  Eigen::VectorXd d_k(static_cast<Eigen::Index>(k_set.size()));
  for (std::size_t q = 0; q < k_set.size(); ++q) d_k[static_cast<Eigen::Index>(q)] = bundle.d[k_set[q]];
  const Eigen::VectorXd top_red = h_red * d_k;
  double reduced = 0.0;
  for (std::size_t p = 0; p < theta.size(); ++p) reduced += bundle.d[theta[p]] * top_red[static_cast<Eigen::Index>(p)];
  for (std::size_t i : gamma) reduced += bundle.d[i] * bundle.d[i];
  for (std::size_t i : j_set) reduced += bundle.d[i] * bundle.d[i];
  return {full, reduced};
}

namespace detail {

bool should_stop(const SolverParams& params, const StopState& s) {
  if (s.f <= params.tol_f) return true;
  if (s.at_target && s.rel_change <= params.tol_rel) return true;
  return s.iterations >= params.max_iter;
}

double current_tau(const BoxBounds& bounds, double lambda, const SolverParams& params) {
  const double tau = select_tau(bounds, lambda, params.lipschitz_estimate);
  return params.tau > 0.0 ? std::min(tau, params.tau) : tau;
}

Vector initial_point(const Problem& problem, std::span<const double> x0) {
  const std::size_t n = problem.bounds.size();
  if (x0.empty()) return Vector(n, 0.0);
  if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "x0 length " + std::to_string(x0.size()));
  if (!problem.bounds.contains(x0)) throw Error(ErrorCode::InfeasiblePoint, "x0 is outside the box");
  return Vector(x0.begin(), x0.end());
}

double effective_lambda0(const Problem& problem, const SolverParams& params) {
  return std::max(problem.lambda_target, params.lambda0);
}

}  // namespace detail

SolverReport solve_bnl0r(const Problem& problem, const SolverParams& params_in, std::span<const double> x0,
                         const IterationObserver& observer) {
  validate_problem(problem);
  const auto start = std::chrono::steady_clock::now();
  const SmoothObjective& obj = *problem.objective;
  const BoxBounds& bounds = problem.bounds;
  SolverParams params = params_in;
  params.recompute_alpha_bar();
  const double lambda_target = problem.lambda_target;
  const double lambda0 = detail::effective_lambda0(problem, params);

  IterateState st;
  st.x = detail::initial_point(problem, x0);
  const std::size_t n = st.x.size();
  st.grad.assign(n, 0.0);
  st.f_val = obj.value_and_gradient(st.x, st.grad);

  SolverReport report;
  Vector x_next;
  Vector g_next(n);
  double lambda = lambda0;
  double tau = detail::current_tau(bounds, lambda, params);
  for (;;) {
    lambda = lambda_schedule(lambda_target, lambda0, params.lambda_decay, st.k);
    tau = detail::current_tau(bounds, lambda, params);
    st.partition = partition_indices(st.x, st.grad, tau, lambda, bounds);
    st.phi_val = st.f_val + lambda * static_cast<double>(count_nonzeros(st.x));
    const IndexList support = st.partition.support();

    std::optional<DirectionBundle> newton = newton_direction(obj, st.x, st.grad, st.partition, bounds);
    bool took_newton = false;
    double f_next = 0.0;
    double d_norm = 0.0;
    if (newton && accept_newton(*newton, st.x, st.grad, st.partition, st.prev_support, params, tau, lambda, bounds)) {
      if (auto step = armijo_search(obj, st.x, st.grad, st.f_val, *newton, st.partition, params, bounds)) {
        const double phi_trial = step->f + lambda * static_cast<double>(count_nonzeros(step->x));
        // Keep the merit monotone at fixed lambda; otherwise take the PGM step.
        if (phi_trial <= st.phi_val) {
          x_next = std::move(step->x);
          f_next = obj.value_and_gradient(x_next, g_next);
          d_norm = std::sqrt(kernels::sum_sq(newton->d.data(), n));
          took_newton = true;
        }
      }
    }
    if (!took_newton) {
      x_next = pgm_step(st.x, st.grad, tau, lambda, bounds);
      f_next = obj.value_and_gradient(x_next, g_next);
      d_norm = std::sqrt(kernels::dist_sq(x_next.data(), st.x.data(), n));
    }
    st.last_step = took_newton ? StepKind::Newton : StepKind::PGM;
    const double phi_next = f_next + lambda * static_cast<double>(count_nonzeros(x_next));

    if (observer) {
      observer(IterationEvent{st.k, lambda, tau, st.x, st.grad, x_next, st.partition, st.prev_support,
                              st.last_step, st.f_val, f_next, st.phi_val, phi_next,
                              took_newton ? &*newton : nullptr});
    }
    report.history.push_back({st.k, f_next, phi_next, d_norm, st.last_step});
    (took_newton ? report.newton_steps : report.pgm_steps) += 1;

    const double change = std::sqrt(kernels::dist_sq(x_next.data(), st.x.data(), n));
    const double x_norm = std::sqrt(kernels::sum_sq(x_next.data(), n));
    const double rel = change / std::max(1.0, x_norm);

    st.x.swap(x_next);
    st.grad.swap(g_next);
    st.f_val = f_next;
    st.prev_support = support;
    st.k += 1;
    if (detail::should_stop(params, {rel, st.f_val, lambda == lambda_target, st.k})) break;
  }

  report.iterations = st.k;
  report.f_final = st.f_val;
  report.nnz = count_nonzeros(st.x);
  report.lambda_final = lambda_target;
  report.tau_final = detail::current_tau(bounds, lambda_target, params);
  const IndexPartition final_part = partition_indices(st.x, st.grad, report.tau_final, lambda_target, bounds);
  report.residual_norm = residual_F(st.x, st.grad, report.tau_final, final_part, bounds).norm;
  report.x_final = std::move(st.x);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace boxl0
