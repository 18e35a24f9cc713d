#pragma once

#include <span>

#include "boxl0/solver.hpp"

namespace boxl0 {

// Proximal iterative hard thresholding: the PGM step at every iteration with
// step 1/L_hat (reduced when needed to keep 2 t lambda < a). Shares the lambda
// homotopy and stopping rule with solve_bnl0r.
SolverReport solve_piht(const Problem& problem, const SolverParams& params, std::span<const double> x0 = {},
                        const IterationObserver& observer = {});

// Proximal gradient on f + lambda |x|_1 over the box. The step starts at 1/L_hat
// and halves until f(x+) <= f(x) + <g, x+ - x> + |x+ - x|^2 / (2t).
// lambda_target = 0 is allowed and gives projected gradient.
SolverReport solve_pga(const Problem& problem, const SolverParams& params, std::span<const double> x0 = {},
                       const IterationObserver& observer = {});

// Step used by solve_piht at a given lambda.
double piht_step(const BoxBounds& bounds, double lambda, const SolverParams& params);

double l1_norm(std::span<const double> x);

}  // namespace boxl0
