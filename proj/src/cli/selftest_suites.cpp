#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "boxl0/baselines.hpp"
#include "boxl0/cli.hpp"
#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"
#include "boxl0/prox.hpp"

namespace boxl0::cli {
namespace {

using Rng = std::mt19937_64;

Vector gaussian(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& e : v) e = normal(rng);
  return v;
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

SuiteResult prox_suite(bool fault) {
  Rng rng(101);
  const double grid = 1e-3;
  for (int c = 0; c < 300; ++c) {
    const double l = uniform(rng, 0.5, 3.0);
    const double u = uniform(rng, 0.5, 3.0);
    const double a = std::min(l * l, u * u);
    const double tl = uniform(rng, 1e-4, 0.49 * a);
    const double z = uniform(rng, -4.0, 4.0);
    const BoxBounds box({l}, {u});
    const double y = prox_l0_box(Vector{z}, tl, box)[0];
    const double y_star = prox_oracle_1d(z, tl, l, u, grid);
    double h = prox_objective_1d(y, z, tl, l, u);
    const double h_star = prox_objective_1d(y_star, z, tl, l, u);
    if (fault && c == 0) h += 1.0;
    if (std::fabs(h - h_star) > grid) {
      return {"prox", false, fmt::format("case {}: z={} h={} oracle={}", c, z, h, h_star)};
    }
  }
  return {"prox", true, "300 cases"};
}

bool adjoint_ok(const LinearMap& map, Rng& rng, double shift) {
  for (int t = 0; t < 20; ++t) {
    const Vector x = gaussian(map.cols(), rng);
    const Vector y = gaussian(map.rows(), rng);
    const Vector ax = map.apply(x);
    const Vector aty = map.adjoint_apply(y);
    double lhs = shift;
    double rhs = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) lhs += ax[i] * y[i];
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * aty[i];
    const double scale = std::sqrt(kernels::sum_sq(ax.data(), ax.size()) * kernels::sum_sq(y.data(), y.size()));
    if (std::fabs(lhs - rhs) > 1e-10 * std::max(scale, 1.0)) return false;
  }
  return true;
}

SuiteResult adjoint_suite(bool fault) {
  Rng rng(202);
  std::vector<std::pair<std::string, MapPtr>> maps;
  const Vector dense = gaussian(30 * 50, rng);
  maps.emplace_back("dense", std::make_shared<DenseMap>(30, 50, dense));
  maps.emplace_back("partial-dft", std::make_shared<PartialDftMap>(PartialDftMap::random_rows(64, 20, 3)));
  maps.emplace_back("haar-forward", std::make_shared<HaarMap>(8, HaarMap::Direction::Forward));
  maps.emplace_back("haar-inverse", std::make_shared<HaarMap>(8, HaarMap::Direction::Inverse));
  maps.emplace_back("composed", std::make_shared<ComposedMap>(
                                    std::make_shared<PartialDftMap>(PartialDftMap::random_rows(64, 24, 4)),
                                    std::make_shared<HaarMap>(8, HaarMap::Direction::Inverse)));
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (!adjoint_ok(*maps[k].second, rng, fault && k == 0 ? 1.0 : 0.0)) {
      return {"adjoint", false, maps[k].first + " violates <Ax, y> = <x, A'y>"};
    }
  }
  return {"adjoint", true, fmt::format("{} maps", maps.size())};
}

SuiteResult partition_suite(bool fault) {
  Rng rng(303);
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 40;
    Vector lo(n), up(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = uniform(rng, 0.5, 2.0);
      up[i] = uniform(rng, 0.5, 2.0);
      x[i] = (i % 3 == 0) ? 0.0 : uniform(rng, -lo[i], up[i]);
    }
    const BoxBounds box(lo, up);
    const Vector g = gaussian(n, rng);
    const double tau = uniform(rng, 0.1, 1.0);
    const double lambda = uniform(rng, 1e-3, 0.45 * box.a() / tau);
    const IndexPartition p = partition_indices(x, g, tau, lambda, box);
    if (p.dim() != n) return {"partition", false, "index sets do not cover 0..n-1"};
    Vector z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - tau * g[i];
    const Vector prox = prox_l0_box(z, tau * lambda, box);
    const Vector proj = box_project(z, box);
    Vector assembled(n, 0.0);
    for (std::size_t i : p.support()) assembled[i] = proj[i];
    if (fault && c == 0) assembled[0] += 1.0;
    if (assembled != prox) return {"partition", false, fmt::format("case {}: PGM assembly differs from prox", c)};
  }
  return {"partition", true, "50 cases"};
}

Problem random_quadratic(std::size_t n, Rng& rng) {
  const std::size_t m = n + 10;
  auto map = std::make_shared<DenseMap>(m, n, gaussian(m * n, rng));
  Vector xs(n, 0.0);
  for (std::size_t i = 0; i < n; i += 4) xs[i] = uniform(rng, -1.0, 2.0);
  Vector b = map->apply(xs);
  const Vector noise = gaussian(m, rng);
  for (std::size_t i = 0; i < m; ++i) b[i] += 0.05 * noise[i];
  return Problem{std::make_shared<LeastSquaresObjective>(map, std::move(b)), BoxBounds::uniform(n, 1.0, 1.5), 0.05};
}

SuiteResult descent_suite(bool fault) {
  Rng rng(404);
  for (int c = 0; c < 5; ++c) {
    const Problem problem = random_quadratic(30, rng);
    SolverParams params = default_params(problem);
    std::string failure;
    auto observer = [&](const IterationEvent& ev) {
      if (!failure.empty()) return;
      if (!problem.bounds.contains(ev.x_next)) failure = "infeasible iterate";
      const double slack = 1e-12 * std::max(1.0, std::fabs(ev.merit_prev));
      const double drop = (fault && c == 0) ? -1.0 : 0.0;
      if (ev.merit_next > ev.merit_prev + slack + drop) failure = "merit increased";
      for (std::size_t i : ev.partition.gamma_u) {
        if (ev.x_next[i] != problem.bounds.upper()[i]) failure = "upper bound not pinned";
      }
      for (std::size_t i : ev.partition.gamma_l) {
        if (ev.x_next[i] != -problem.bounds.lower()[i]) failure = "lower bound not pinned";
      }
    };
    // The merit is only comparable at fixed lambda, so run at the target from the start.
    params.lambda0 = problem.lambda_target;
    solve_bnl0r(problem, params, {}, observer);
    solve_piht(problem, params, {}, observer);
    solve_pga(problem, params, {}, observer);
    if (!failure.empty()) return {"descent", false, fmt::format("instance {}: {}", c, failure)};
  }
  return {"descent", true, "5 instances x 3 solvers"};
}

SuiteResult identity_suite(bool fault) {
  Rng rng(505);
  int bundles = 0;
  for (int c = 0; c < 200 && bundles < 30; ++c) {
    const Problem problem = random_quadratic(24, rng);
    const auto& obj = *problem.objective;
    Vector x(24, 0.0);
    for (std::size_t i = 0; i < 24; i += 2) x[i] = uniform(rng, -1.0, 1.5);
    const Vector g = obj.gradient(x);
    const double tau = 0.05;
    const IndexPartition p = partition_indices(x, g, tau, problem.lambda_target, problem.bounds);
    auto bundle = newton_direction(obj, x, g, p, problem.bounds);
    if (!bundle || p.theta.empty()) continue;
    // The previous support always covers supp(x).
    IndexList prev;
    for (std::size_t i = 0; i < 24; ++i) {
      if (x[i] != 0.0 || std::uniform_int_distribution<int>(0, 2)(rng) == 0) prev.push_back(i);
    }
    QuadraticForms q = newton_quadratic_forms(obj, x, *bundle, p, prev);
    if (fault && bundles == 0) q.reduced += 1.0;
    if (std::fabs(q.full - q.reduced) > 1e-10 * std::max(1.0, std::fabs(q.full))) {
      return {"identity", false, fmt::format("bundle {}: full {} vs reduced {}", bundles, q.full, q.reduced)};
    }
    ++bundles;
  }
  if (bundles < 30) return {"identity", false, "too few Newton bundles generated"};
  return {"identity", true, fmt::format("{} bundles", bundles)};
}

SuiteResult simd_suite(bool fault) {
  const kernels::KernelTable* wide = kernels::avx2_table();
  if (wide == nullptr) return {"simd", true, "no wide variant on this CPU"};
  const kernels::KernelTable& ref = kernels::scalar_table();
  Rng rng(606);
  for (std::size_t n : {0, 1, 3, 4, 7, 16, 33, 1000}) {
    const Vector x = gaussian(n, rng);
    const Vector y = gaussian(n, rng);
    Vector lo(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = uniform(rng, 0.2, 1.5);
      up[i] = uniform(rng, 0.2, 1.5);
    }
    auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)); };
    double shift = (fault && n == 1000) ? 1.0 : 0.0;
    if (!close(ref.dot(x.data(), y.data(), n) + shift, wide->dot(x.data(), y.data(), n)) ||
        !close(ref.sum_sq(x.data(), n), wide->sum_sq(x.data(), n)) ||
        !close(ref.dist_sq(x.data(), y.data(), n), wide->dist_sq(x.data(), y.data(), n))) {
      return {"simd", false, fmt::format("reduction mismatch at n={}", n)};
    }
    Vector a(n), b(n);
    auto same = [&](const char* what) -> std::optional<SuiteResult> {
      if (a != b) return SuiteResult{"simd", false, fmt::format("{} differs at n={}", what, n)};
      return std::nullopt;
    };
    a = y;
    b = y;
    ref.axpy(0.7, x.data(), a.data(), n);
    wide->axpy(0.7, x.data(), b.data(), n);
    if (auto r = same("axpy")) return *r;
    ref.grad_step(x.data(), y.data(), 0.3, a.data(), n);
    wide->grad_step(x.data(), y.data(), 0.3, b.data(), n);
    if (auto r = same("grad_step")) return *r;
    ref.clamp_box(x.data(), lo.data(), up.data(), a.data(), n);
    wide->clamp_box(x.data(), lo.data(), up.data(), b.data(), n);
    if (auto r = same("clamp_box")) return *r;
    ref.hard_threshold_box(x.data(), 0.4, lo.data(), up.data(), a.data(), n);
    wide->hard_threshold_box(x.data(), 0.4, lo.data(), up.data(), b.data(), n);
    if (auto r = same("hard_threshold_box")) return *r;
    ref.soft_threshold_box(x.data(), 0.4, lo.data(), up.data(), a.data(), n);
    wide->soft_threshold_box(x.data(), 0.4, lo.data(), up.data(), b.data(), n);
    if (auto r = same("soft_threshold_box")) return *r;
  }
  return {"simd", true, std::string("scalar vs ") + wide->name};
}

const std::vector<std::pair<std::string, std::function<SuiteResult(bool)>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<SuiteResult(bool)>>> suites{
      {"prox", prox_suite},         {"adjoint", adjoint_suite},   {"partition", partition_suite},
      {"descent", descent_suite},   {"identity", identity_suite}, {"simd", simd_suite},
  };
  return suites;
}

}  // namespace

std::vector<std::string> selftest_suite_names() {
  std::vector<std::string> names;
  for (const auto& s : registry()) names.push_back(s.first);
  return names;
}

std::vector<SuiteResult> run_selftest(const std::vector<std::string>& suites, bool inject_fault) {
  for (const auto& name : suites) {
    const auto& reg = registry();
    if (std::none_of(reg.begin(), reg.end(), [&](const auto& s) { return s.first == name; })) {
      throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
    }
  }
  std::vector<SuiteResult> out;
  for (const auto& [name, fn] : registry()) {
    if (!suites.empty() && std::find(suites.begin(), suites.end(), name) == suites.end()) continue;
    try {
      out.push_back(fn(inject_fault));
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  }
  return out;
}

}  // namespace boxl0::cli
