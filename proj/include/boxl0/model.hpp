#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "boxl0/operators.hpp"

namespace boxl0 {

// Feasible set {x : -lower <= x <= upper} with strictly positive entries.
class BoxBounds {
 public:
  // Throws DimensionMismatch or NonpositiveBound.
  BoxBounds(Vector lower, Vector upper);

  static BoxBounds uniform(std::size_t n, double lower, double upper);

  std::size_t size() const { return lower_.size(); }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }

  // min_i min(lower_i^2, upper_i^2)
  double a() const { return a_; }

  bool contains(std::span<const double> x, double tol = 0.0) const;

 private:
  Vector lower_;
  Vector upper_;
  double a_ = 0.0;
};

class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient_into(std::span<const double> x, std::span<double> g) const = 0;
  // Returns f(x) and writes the gradient; objectives override when sharing work pays.
  virtual double value_and_gradient(std::span<const double> x, std::span<double> g) const;
  // |rows| x |cols| restriction of the Hessian at x.
  virtual Eigen::MatrixXd hessian_block(std::span<const double> x, std::span<const std::size_t> rows,
                                        std::span<const std::size_t> cols) const = 0;
  // out = Hessian(x) * v
  virtual void hessian_apply(std::span<const double> x, std::span<const double> v,
                             std::span<double> out) const = 0;
  // Upper bound on the Hessian rank; a principal block larger than this is singular.
  virtual std::size_t hessian_rank_bound() const { return dim(); }

  Vector gradient(std::span<const double> x) const;
};

using ObjectivePtr = std::shared_ptr<const SmoothObjective>;

// f(x) = 1/2 |A x - b|^2. For maps with complex rows, b holds interleaved
// (re, im) pairs, which makes f the complex modulus norm and the gradient
// Re(A^H (A x - b)).
class LeastSquaresObjective final : public SmoothObjective {
 public:
  LeastSquaresObjective(MapPtr map, Vector observation);
  LeastSquaresObjective(MapPtr map, std::span<const std::complex<double>> observation);

  std::size_t dim() const override { return map_->cols(); }
  const LinearMap& map() const { return *map_; }
  const MapPtr& map_ptr() const { return map_; }
  std::span<const double> observation() const { return b_; }

  double value(std::span<const double> x) const override;
  void gradient_into(std::span<const double> x, std::span<double> g) const override;
  double value_and_gradient(std::span<const double> x, std::span<double> g) const override;
  Eigen::MatrixXd hessian_block(std::span<const double> x, std::span<const std::size_t> rows,
                                std::span<const std::size_t> cols) const override;
  void hessian_apply(std::span<const double> x, std::span<const double> v,
                     std::span<double> out) const override;
  std::size_t hessian_rank_bound() const override { return std::min(map_->rows(), map_->cols()); }

  // Residual A x - b.
  Vector residual(std::span<const double> x) const;

 private:
  MapPtr map_;
  Vector b_;
};

struct Problem {
  ObjectivePtr objective;
  BoxBounds bounds;
  double lambda_target;
};

// Throws DimensionMismatch, NonpositiveBound or NonpositiveLambda.
void validate_problem(const Problem& problem);

enum class StepKind { Newton, PGM };

const char* to_string(StepKind kind);

struct SolverParams {
  double tau = 0.0;  // upper cap on the step parameter; 0 means uncapped
  double lambda0 = 0.0;
  double lambda_decay = 0.5;
  double delta = 1e-6;
  double sigma = 1e-4;
  double beta = 0.5;
  double alpha_bar = 1.0;
  double lipschitz_estimate = 1.0;
  int max_iter = 2000;
  double tol_rel = 1e-6;
  double tol_f = 0.0;
  int max_backtracks = 40;
  bool strict_acceptance = false;

  // alpha_bar = min{(1-2 sigma)/(L/delta - sigma), 2(1-sigma) delta / L, 1}
  void recompute_alpha_bar();
};

double compute_alpha_bar(double lipschitz, double delta, double sigma);

struct HistoryEntry {
  int k = 0;
  double f = 0.0;
  double phi = 0.0;
  double d_norm = 0.0;
  StepKind kind = StepKind::PGM;
};

struct SolverReport {
  Vector x_final;
  int iterations = 0;
  double wall_time = 0.0;
  double f_final = 0.0;
  std::size_t nnz = 0;
  double residual_norm = 0.0;
  int newton_steps = 0;
  int pgm_steps = 0;
  double lambda_final = 0.0;
  double tau_final = 0.0;
  std::vector<HistoryEntry> history;
};

std::size_t count_nonzeros(std::span<const double> x);

}  // namespace boxl0
