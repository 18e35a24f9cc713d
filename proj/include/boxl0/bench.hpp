#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "boxl0/model.hpp"
#include "boxl0/solver.hpp"

namespace boxl0 {

enum class Experiment { E1, E2, E3, E4 };

const char* to_string(Experiment e);
// Accepts "e1".."e4" (case-insensitive); throws InvalidArgument otherwise.
Experiment parse_experiment(const std::string& name);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct InstanceMeta {
  Experiment experiment = Experiment::E1;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t s = 0;
  std::uint64_t seed = 0;
  double snr_db = kNoNoise;  // E2, E3
  double nf = 0.0;           // E4
  std::string box;
};

struct Instance {
  Problem problem;
  Vector groundtruth;
  InstanceMeta meta;
  double tol_f = 0.0;    // per-experiment stopping threshold on f
  std::size_t side = 0;  // image side for E4
  double lipschitz = 0.0;  // L_hat shared by every algorithm on this instance
};

// Gaussian A with unit-norm columns, s = max(1, round(0.001 n)) nonzeros uniform
// on [0.1, 3], box [-3, 3]^n, b = A x*. lambda_target is left at 0 for the caller.
Instance gen_e1(std::size_t n, double m_ratio, std::uint64_t seed);

// gen_e1 with b perturbed to the given SNR.
Instance gen_e2(std::size_t n, double m_ratio, double snr_db, std::uint64_t seed);

// clean + xi with |clean|^2 / |xi|^2 = 10^(snr_db / 10) exactly. kNoNoise returns clean.
Vector add_noise_snr(std::span<const double> clean, double snr_db, std::uint64_t seed);

// Four quarters with 25 nonzeros each, quarter q (1..4) uniform on [0, q] and box
// [-(q+1), q+1]; m = n / 4; noise at snr_db.
Instance gen_e3(std::size_t n, double snr_db, std::uint64_t seed);

// A = F W^-1 with m random DFT rows (row 0 always kept: the image mean is only
// visible there); x* = W(image); b = A x* + nf * N in both
// real and imaginary parts. image is row-major side x side. Bounds are
// max(10, 1.1 max|x*|) so the coarse coefficients of a [0, 1] image stay feasible.
Instance gen_e4(std::span<const double> image, std::size_t side, std::size_t m, double nf, std::uint64_t seed);

// Test image in [0, 1]: gray background with small zero-mean checker patches on a ring.
Vector phantom(std::size_t side);

// Default sample count for an E4 image with n pixels: 14369 per 65536.
std::size_t e4_default_m(std::size_t n);

// Fraction of lambda_upper used as lambda_target: 1e-3 for E1 (the entry gate
// sqrt(2 lambda / tau) must sit below the smallest nonzero, 0.1), 1e-6 for E4,
// where the DC gradient of the image dominates lambda_upper, and 0.01 otherwise.
double default_lambda_frac(Experiment e);

double metric_res(std::span<const double> x, std::span<const double> xstar);
// 10 log10(n / |x - x*|^2); +inf when x == x*.
double metric_psnr(std::span<const double> x, std::span<const double> xstar, std::size_t n);

enum class Algorithm { BNL0R, PIHT, PGA };
const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
  Experiment experiment = Experiment::E1;
  std::vector<std::size_t> sizes{1000};
  double m_ratio = 0.25;
  std::size_t m = 0;  // absolute override; 0 means derived from m_ratio (or the E4 default)
  int trials = 20;
  std::uint64_t master_seed = 1;
  double snr_db = 30.0;
  double nf = 0.05;
  double lambda = 0.0;  // 0 means lambda_frac * lambda_upper
  std::optional<double> lambda_frac;  // unset means default_lambda_frac(experiment)
  double tau_cap = 0.0;
  double tol_rel = 1e-6;
  std::optional<double> tol_f;
  int max_iter = 2000;
  bool strict_acceptance = false;
  std::vector<Algorithm> algorithms{Algorithm::PGA, Algorithm::PIHT, Algorithm::BNL0R};
  int jobs = 1;
  Vector image;            // E4 input (row-major); empty means phantom(side)
  std::string image_path;  // PGM file the front end loads into `image`
};

// Throws InvalidArgument on an unusable config.
void validate_config(const ExperimentConfig& config);

struct TrialResult {
  Algorithm algorithm = Algorithm::BNL0R;
  InstanceMeta meta;
  int trial = 0;
  double lambda = 0.0;
  double tau = 0.0;
  int iter = 0;
  double time_s = 0.0;
  double res = 0.0;
  std::optional<double> psnr;
  std::size_t nnz = 0;
  double f_final = 0.0;
  double residual_F = 0.0;
  bool failed = false;
  std::string error;
  Vector x_final;  // kept only when requested
};

// Seed of one trial, mixed from the master seed and the cell coordinates.
std::uint64_t trial_seed(std::uint64_t master, Experiment e, std::size_t n, int trial);

// Builds the instance for one (size, seed) cell of a config and sets lambda_target.
Instance make_instance(const ExperimentConfig& config, std::size_t n, std::uint64_t seed);

// Solver parameters shared by all algorithms on an instance.
SolverParams instance_params(const ExperimentConfig& config, const Instance& instance);

TrialResult run_algorithm(Algorithm algorithm, const Instance& instance, const SolverParams& params,
                          bool keep_x = false);

// All (size, trial, algorithm) cells; rows ordered by n, trial, algorithm order in
// the config. Failures are recorded per row and never abort the batch.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config);

std::string csv_header();
std::string csv_row(const TrialResult& r);

struct CellSummary {
  Algorithm algorithm;
  std::size_t n;
  int trials;
  int failed;
  double mean_iter;
  double mean_time;
  double mean_res;
  std::optional<double> mean_psnr;
};

// Per (algorithm, n) means over non-failed rows, in first-appearance order.
std::vector<CellSummary> summarize(const std::vector<TrialResult>& rows);

}  // namespace boxl0
