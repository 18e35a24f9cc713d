#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "boxl0/baselines.hpp"
#include "boxl0/bench.hpp"
#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"

namespace boxl0 {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// k distinct indices from [0, n), in sampling order.
IndexList sample_without_replacement(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  IndexList pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

// m x n Gaussian matrix with unit-norm columns.
std::shared_ptr<DenseMap> normalized_gaussian(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  Vector a(m * n);
  std::normal_distribution<double> normal;
  for (std::size_t j = 0; j < n; ++j) {
    double* col = a.data() + j * m;
    for (std::size_t i = 0; i < m; ++i) col[i] = normal(rng);
    const double norm = std::sqrt(kernels::sum_sq(col, m));
    for (std::size_t i = 0; i < m; ++i) col[i] /= norm;
  }
  return std::make_shared<DenseMap>(m, n, std::move(a));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double largest_magnitude(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

std::string format_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::E1: return "e1";
    case Experiment::E2: return "e2";
    case Experiment::E3: return "e3";
    case Experiment::E4: return "e4";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  const std::string s = lower(name);
  if (s == "e1") return Experiment::E1;
  if (s == "e2") return Experiment::E2;
  if (s == "e3") return Experiment::E3;
  if (s == "e4") return Experiment::E4;
  throw Error(ErrorCode::InvalidArgument, "unknown experiment '" + name + "'");
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::BNL0R: return "BNL0R";
    case Algorithm::PIHT: return "PIHT";
    case Algorithm::PGA: return "PGA";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  const std::string s = lower(name);
  if (s == "bnl0r") return Algorithm::BNL0R;
  if (s == "piht") return Algorithm::PIHT;
  if (s == "pga") return Algorithm::PGA;
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
}

Instance gen_e1(std::size_t n, double m_ratio, std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(std::llround(m_ratio * static_cast<double>(n)));
  if (m < 1 || static_cast<double>(n) * 0.001 < 1.0) {
    throw Error(ErrorCode::BadShape, "e1 needs n * m_ratio >= 1 and n >= 1000");
  }
  const auto s = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.001 * static_cast<double>(n))));
  std::mt19937_64 rng(seed);
  auto a = normalized_gaussian(m, n, rng);

  Vector xstar(n, 0.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i : sample_without_replacement(n, s, rng)) xstar[i] = 0.1 + (3.0 - 0.1) * unif(rng);

  Vector b = a->apply(xstar);
  Instance inst{Problem{std::make_shared<LeastSquaresObjective>(a, std::move(b)), BoxBounds::uniform(n, 3.0, 3.0), 0.0},
                std::move(xstar),
                InstanceMeta{Experiment::E1, n, m, s, seed, kNoNoise, 0.0, "uniform:3"},
                1e-20};
  return inst;
}

Vector add_noise_snr(std::span<const double> clean, double snr_db, std::uint64_t seed) {
  Vector out(clean.begin(), clean.end());
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  const double signal = kernels::sum_sq(clean.data(), clean.size());
  if (!(signal > 0.0)) throw Error(ErrorCode::ZeroSignal, "cannot set an SNR on a zero signal");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector xi(clean.size());
  for (auto& v : xi) v = normal(rng);
  const double raw = kernels::sum_sq(xi.data(), xi.size());
  const double scale = std::sqrt(signal / std::pow(10.0, snr_db / 10.0) / raw);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * xi[i];
  return out;
}

Instance gen_e2(std::size_t n, double m_ratio, double snr_db, std::uint64_t seed) {
  Instance base = gen_e1(n, m_ratio, seed);
  const auto& ls = static_cast<const LeastSquaresObjective&>(*base.problem.objective);
  Vector b = add_noise_snr(ls.observation(), snr_db, splitmix64(seed ^ 0x6e6f697365ULL));
  base.problem.objective = std::make_shared<LeastSquaresObjective>(ls.map_ptr(), std::move(b));
  base.meta.experiment = Experiment::E2;
  base.meta.snr_db = snr_db;
  base.tol_f = 1e-6;
  return base;
}

Instance gen_e3(std::size_t n, double snr_db, std::uint64_t seed) {
  if (n % 4 != 0 || n / 4 < 25) throw Error(ErrorCode::BadShape, "e3 needs n divisible by 4 and n / 4 >= 25");
  const std::size_t quarter = n / 4;
  const std::size_t m = n / 4;
  std::mt19937_64 rng(seed);
  auto a = normalized_gaussian(m, n, rng);

  Vector xstar(n, 0.0);
  Vector bound(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t q = 0; q < 4; ++q) {
    const double scale = static_cast<double>(q + 1);
    std::fill(bound.begin() + static_cast<std::ptrdiff_t>(q * quarter),
              bound.begin() + static_cast<std::ptrdiff_t>((q + 1) * quarter), scale + 1.0);
    for (std::size_t i : sample_without_replacement(quarter, 25, rng)) {
      double v = 0.0;
      while (v == 0.0) v = scale * unif(rng);
      xstar[q * quarter + i] = v;
    }
  }
  Vector b = add_noise_snr(a->apply(xstar), snr_db, splitmix64(seed ^ 0x6e6f697365ULL));
  Instance inst{Problem{std::make_shared<LeastSquaresObjective>(a, std::move(b)), BoxBounds(bound, bound), 0.0},
                std::move(xstar),
                InstanceMeta{Experiment::E3, n, m, 100, seed, snr_db, 0.0, "quarters:2,3,4,5"},
                1e-6};
  return inst;
}

std::size_t e4_default_m(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(14369.0 / 65536.0 * static_cast<double>(n))));
}

Instance gen_e4(std::span<const double> image, std::size_t side, std::size_t m, double nf, std::uint64_t seed) {
  if (!is_power_of_two(side)) throw Error(ErrorCode::SideNotPowerOfTwo, "image side must be a power of two");
  const std::size_t n = side * side;
  if (image.size() != n) throw Error(ErrorCode::BadShape, "image has " + std::to_string(image.size()) + " pixels");
  if (m < 1 || m > n) throw Error(ErrorCode::BadShape, "e4 needs 1 <= m <= side^2");
  if (!(nf >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise factor must be >= 0");

  auto dft = std::make_shared<PartialDftMap>(PartialDftMap::random_rows(n, m, seed, true));
  auto inv = std::make_shared<HaarMap>(side, HaarMap::Direction::Inverse);
  auto a = std::make_shared<ComposedMap>(dft, inv);
  Vector xstar = haar_forward(image, side);

  Vector b = a->apply(xstar);
  std::mt19937_64 rng(splitmix64(seed ^ 0x6e6f697365ULL));
  std::normal_distribution<double> normal;
  double noise_sq = 0.0;
  if (nf > 0.0) {
    for (auto& v : b) {
      const double e = nf * normal(rng);
      v += e;
      noise_sq += e * e;
    }
  }
  const double width = std::max(10.0, 1.1 * largest_magnitude(xstar));
  const std::size_t s = count_nonzeros(xstar);
  Instance inst{Problem{std::make_shared<LeastSquaresObjective>(a, std::move(b)), BoxBounds::uniform(n, width, width),
                        0.0},
                std::move(xstar),
                InstanceMeta{Experiment::E4, n, m, s, seed, kNoNoise, nf, "uniform:" + format_double("%g", width)},
                0.5 * noise_sq,
                side};
  return inst;
}

Vector phantom(std::size_t side) {
  if (!is_power_of_two(side) || side < 16) {
    throw Error(ErrorCode::SideNotPowerOfTwo, "phantom side must be a power of two >= 16");
  }
  // Gray background with zero-mean 2x2 checker patches along a ring. Each patch is one
  // finest-scale diagonal Haar coefficient; the background is the DC coefficient.
  Vector img(side * side, 0.5);
  const double centre = static_cast<double>(side) / 2.0;
  const double radius = 0.3 * static_cast<double>(side);
  const std::size_t patches = side / 2;
  const double amplitude[] = {0.25, -0.15, 0.2, -0.3};
  for (std::size_t p = 0; p < patches; ++p) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(patches);
    const auto r = 2 * static_cast<std::size_t>((centre + radius * std::sin(angle)) / 2.0);
    const auto c = 2 * static_cast<std::size_t>((centre + radius * std::cos(angle)) / 2.0);
    const double a = amplitude[p % 4];
    img[r * side + c] += a;
    img[r * side + c + 1] -= a;
    img[(r + 1) * side + c] -= a;
    img[(r + 1) * side + c + 1] += a;
  }
  return img;
}

double default_lambda_frac(Experiment e) {
  switch (e) {
    case Experiment::E1:
      return 1e-3;
    case Experiment::E4:
      return 1e-6;
    default:
      return 0.01;
  }
}

double metric_res(std::span<const double> x, std::span<const double> xstar) {
  if (x.size() != xstar.size()) throw Error(ErrorCode::DimensionMismatch, "res: lengths differ");
  return std::sqrt(kernels::dist_sq(x.data(), xstar.data(), x.size()));
}

double metric_psnr(std::span<const double> x, std::span<const double> xstar, std::size_t n) {
  const double r = metric_res(x, xstar);
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(n) / (r * r));
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (c.trials < 1) fail("trials must be >= 1");
  if (c.sizes.empty()) fail("at least one size is required");
  if (c.algorithms.empty()) fail("at least one algorithm is required");
  if (c.jobs < 1) fail("jobs must be >= 1");
  if (!(c.m_ratio > 0.0 && c.m_ratio <= 1.0)) fail("m-ratio must be in (0, 1]");
  if (c.lambda < 0.0 || (c.lambda_frac && !(*c.lambda_frac > 0.0))) fail("lambda settings must be positive");
  if (c.max_iter < 1) fail("max-iter must be >= 1");
  for (std::size_t n : c.sizes) {
    if (n == 0) fail("sizes must be positive");
    if (c.experiment == Experiment::E4) {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (side * side != n || !is_power_of_two(side)) fail("e4 sizes must be squares of powers of two");
      if (!c.image.empty() && c.image.size() != n) fail("e4 image does not match size " + std::to_string(n));
    }
  }
}

std::uint64_t trial_seed(std::uint64_t master, Experiment e, std::size_t n, int trial) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(e));
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

Instance make_instance(const ExperimentConfig& config, std::size_t n, std::uint64_t seed) {
  Instance inst = [&] {
    switch (config.experiment) {
      case Experiment::E1:
        return gen_e1(n, config.m_ratio, seed);
      case Experiment::E2:
        return gen_e2(n, config.m_ratio, config.snr_db, seed);
      case Experiment::E3:
        return gen_e3(n, config.snr_db, seed);
      case Experiment::E4: {
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
        const Vector img = config.image.empty() ? phantom(side) : config.image;
        return gen_e4(img, side, config.m > 0 ? config.m : e4_default_m(n), config.nf, seed);
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown experiment");
  }();
  if (config.m > 0 && config.experiment != Experiment::E4) {
    throw Error(ErrorCode::InvalidArgument, "absolute m is only supported for e4");
  }
  inst.lipschitz = 1.05 * estimate_lipschitz(*inst.problem.objective, 60, 1);
  if (!(inst.lipschitz > 0.0)) inst.lipschitz = 1.0;
  inst.problem.lambda_target =
      config.lambda > 0.0 ? config.lambda
                          : config.lambda_frac.value_or(default_lambda_frac(config.experiment)) * lambda_upper(*inst.problem.objective, inst.problem.bounds, inst.lipschitz);
  if (!(inst.problem.lambda_target > 0.0)) throw Error(ErrorCode::ZeroSignal, "gradient at 0 vanishes");
  return inst;
}

SolverParams instance_params(const ExperimentConfig& config, const Instance& inst) {
  SolverParams p;
  p.lipschitz_estimate = inst.lipschitz;
  const double upper = lambda_upper(*inst.problem.objective, inst.problem.bounds, inst.lipschitz);
  p.lambda0 = std::max(inst.problem.lambda_target, 0.5 * upper);
  p.tau = config.tau_cap;
  p.tol_rel = config.tol_rel;
  p.tol_f = config.tol_f.value_or(inst.tol_f);
  p.max_iter = config.max_iter;
  p.strict_acceptance = config.strict_acceptance;
  p.recompute_alpha_bar();
  return p;
}

TrialResult run_algorithm(Algorithm algorithm, const Instance& inst, const SolverParams& params, bool keep_x) {
  TrialResult r;
  r.algorithm = algorithm;
  r.meta = inst.meta;
  r.lambda = inst.problem.lambda_target;
  try {
    SolverReport rep;
    switch (algorithm) {
      case Algorithm::BNL0R:
        rep = solve_bnl0r(inst.problem, params);
        r.tau = rep.tau_final;
        break;
      case Algorithm::PIHT:
        rep = solve_piht(inst.problem, params);
        r.tau = piht_step(inst.problem.bounds, inst.problem.lambda_target, params);
        break;
      case Algorithm::PGA:
        rep = solve_pga(inst.problem, params);
        r.tau = rep.tau_final;
        break;
    }
    r.iter = rep.iterations;
    r.time_s = rep.wall_time;
    r.res = metric_res(rep.x_final, inst.groundtruth);
    if (inst.meta.experiment == Experiment::E4) r.psnr = metric_psnr(rep.x_final, inst.groundtruth, inst.meta.n);
    r.nnz = rep.nnz;
    r.f_final = rep.f_final;
    r.residual_F = rep.residual_norm;
    if (keep_x) r.x_final = std::move(rep.x_final);
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  struct Cell {
    std::size_t n;
    int trial;
  };
  std::vector<Cell> cells;
  for (std::size_t n : config.sizes) {
    for (int t = 0; t < config.trials; ++t) cells.push_back({n, t});
  }
  const std::size_t per_cell = config.algorithms.size();
  std::vector<TrialResult> rows(cells.size() * per_cell);

  auto run_cell = [&](std::size_t c) {
    const Cell cell = cells[c];
    const std::uint64_t seed = trial_seed(config.master_seed, config.experiment, cell.n, cell.trial);
    std::optional<Instance> inst;
    std::string error;
    try {
      inst = make_instance(config, cell.n, seed);
    } catch (const std::exception& e) {
      error = e.what();
    }
    for (std::size_t a = 0; a < per_cell; ++a) {
      TrialResult r;
      if (inst) {
        r = run_algorithm(config.algorithms[a], *inst, instance_params(config, *inst));
      } else {
        r.algorithm = config.algorithms[a];
        r.meta = InstanceMeta{config.experiment, cell.n, 0, 0, seed, kNoNoise, 0.0, ""};
        r.failed = true;
        r.error = error;
      }
      r.trial = cell.trial;
      rows[c * per_cell + a] = std::move(r);
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), cells.size());
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells.size(); ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) run_cell(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string csv_header() { return "experiment,algorithm,n,m,s,seed,lambda,tau,iter,time_s,res,psnr,nnz,f_final,residual_F"; }

std::string csv_row(const TrialResult& r) {
  std::string out;
  out += to_string(r.meta.experiment);
  out += ',';
  out += to_string(r.algorithm);
  out += ',' + std::to_string(r.meta.n) + ',' + std::to_string(r.meta.m) + ',' + std::to_string(r.meta.s) + ',' +
         std::to_string(r.meta.seed);
  if (r.failed) return out + ",nan,nan,nan,nan,nan,,nan,nan,nan";
  out += ',' + format_double("%.6e", r.lambda);
  out += ',' + format_double("%.6e", r.tau);
  out += ',' + std::to_string(r.iter);
  out += ',' + format_double("%.6f", r.time_s);
  out += ',' + format_double("%.6e", r.res);
  out += ',';
  if (r.psnr) out += std::isinf(*r.psnr) ? std::string("inf") : format_double("%.4f", *r.psnr);
  out += ',' + std::to_string(r.nnz);
  out += ',' + format_double("%.6e", r.f_final);
  out += ',' + format_double("%.6e", r.residual_F);
  return out;
}

std::vector<CellSummary> summarize(const std::vector<TrialResult>& rows) {
  std::vector<CellSummary> out;
  std::map<std::pair<int, std::size_t>, std::size_t> where;
  std::vector<int> psnr_count;
  for (const TrialResult& r : rows) {
    const auto key = std::make_pair(static_cast<int>(r.algorithm), r.meta.n);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, out.size()).first;
      out.push_back({r.algorithm, r.meta.n, 0, 0, 0.0, 0.0, 0.0, std::nullopt});
      psnr_count.push_back(0);
    }
    CellSummary& s = out[it->second];
    if (r.failed) {
      ++s.failed;
      continue;
    }
    ++s.trials;
    s.mean_iter += r.iter;
    s.mean_time += r.time_s;
    s.mean_res += r.res;
    if (r.psnr) {
      s.mean_psnr = s.mean_psnr.value_or(0.0) + *r.psnr;
      ++psnr_count[it->second];
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    CellSummary& s = out[i];
    if (s.trials == 0) continue;
    s.mean_iter /= s.trials;
    s.mean_time /= s.trials;
    s.mean_res /= s.trials;
    if (s.mean_psnr) *s.mean_psnr /= psnr_count[i];
  }
  return out;
}

}  // namespace boxl0
