#include <doctest.h>

#include <cmath>

#include "boxl0/error.hpp"
#include "boxl0/model.hpp"
#include "support.hpp"

using namespace boxl0;
using boxl0::testing::Rng;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

Problem identity_problem(std::size_t n, Vector b) {
  auto obj = std::make_shared<LeastSquaresObjective>(std::make_shared<DenseMap>(DenseMap::identity(n)), std::move(b));
  return Problem{obj, BoxBounds::uniform(n, 1.0, 1.0), 0.1};
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("box bounds") {
  CHECK(code_of([] { BoxBounds({1, 0, 1}, {1, 1, 1}); }) == ErrorCode::NonpositiveBound);
  CHECK(code_of([] { BoxBounds({1, 1}, {1, 1, 1}); }) == ErrorCode::DimensionMismatch);
  const BoxBounds box({2, 0.5}, {1, 3});
  CHECK(box.a() == doctest::Approx(0.25));
  CHECK(box.contains(Vector{1, -0.5}));
  CHECK_FALSE(box.contains(Vector{1.01, 0}));
  CHECK(box.contains(Vector{1.01, 0}, 0.02));
}

TEST_CASE("validate_problem") {
  validate_problem(identity_problem(3, {1, 0, 0}));
  Problem p = identity_problem(3, {1, 0, 0});
  p.bounds = BoxBounds::uniform(4, 1, 1);
  CHECK(code_of([&] { validate_problem(p); }) == ErrorCode::DimensionMismatch);
  Problem q = identity_problem(3, {1, 0, 0});
  q.lambda_target = 0.0;
  CHECK(code_of([&] { validate_problem(q); }) == ErrorCode::NonpositiveLambda);
  CHECK(code_of([] {
          LeastSquaresObjective(std::make_shared<DenseMap>(DenseMap::identity(3)), Vector{1, 2});
        }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("least squares values and gradient") {
  LeastSquaresObjective f(std::make_shared<DenseMap>(DenseMap::identity(2)), Vector{1, 0});
  CHECK(f.value(Vector{1, 0}) == 0.0);
  CHECK(f.value(Vector{0, 0}) == doctest::Approx(0.5));
  const Vector g = f.gradient(Vector{0, 0});
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(0.0));
  Vector g2(2);
  CHECK(f.value_and_gradient(Vector{2, 1}, g2) == doctest::Approx(1.0));
  CHECK(g2 == Vector{1, 1});
}

TEST_CASE("gradient matches central differences") {
  Rng rng(21);
  auto map = testing::gaussian_map(12, 9, rng);
  LeastSquaresObjective f(map, testing::gaussian(12, rng));
  const Vector x = testing::gaussian(9, rng);
  const Vector g = f.gradient(x);
  const double h = 1e-6;
  for (std::size_t i = 0; i < 9; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (f.value(xp) - f.value(xm)) / (2 * h);
    CHECK(std::fabs(fd - g[i]) <= 1e-6 * std::max(1.0, std::fabs(g[i])));
  }
}

TEST_CASE("complex measurements") {
  Rng rng(22);
  auto dft = std::make_shared<PartialDftMap>(PartialDftMap::random_rows(16, 5, 4));
  const Vector xs = testing::gaussian(16, rng);
  const ComplexVector y = dft->apply_complex(xs);
  LeastSquaresObjective f(dft, y);
  CHECK(f.value(xs) < 1e-24);
  const Vector x = testing::gaussian(16, rng);
  // f is half the squared complex modulus of the residual
  const ComplexVector ax = dft->apply_complex(x);
  double ref = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) ref += 0.5 * std::norm(ax[j] - y[j]);
  CHECK(f.value(x) == doctest::Approx(ref).epsilon(1e-12));
  const Vector g = f.gradient(x);
  const double h = 1e-6;
  for (std::size_t i = 0; i < 16; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    CHECK(std::fabs((f.value(xp) - f.value(xm)) / (2 * h) - g[i]) <= 1e-6);
  }
}

TEST_CASE("hessian blocks") {
  LeastSquaresObjective id(std::make_shared<DenseMap>(DenseMap::identity(3)), Vector{0, 0, 0});
  const Vector x0(3, 0.0);
  const std::vector<std::size_t> rc{0, 2};
  CHECK(id.hessian_block(x0, rc, rc).isApprox(Eigen::MatrixXd::Identity(2, 2)));
  const Eigen::MatrixXd empty = id.hessian_block(x0, {}, {});
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 0);

  Rng rng(23);
  auto map = testing::gaussian_map(8, 12, rng);
  LeastSquaresObjective f(map, testing::gaussian(8, rng));
  const Eigen::MatrixXd a = testing::to_eigen(*map);
  const Eigen::MatrixXd ata = a.transpose() * a;
  const std::vector<std::size_t> rows{1, 4, 7, 11};
  const std::vector<std::size_t> cols{0, 4, 5, 9, 10};
  const Vector x = testing::gaussian(12, rng);
  const Eigen::MatrixXd h = f.hessian_block(x, rows, cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) CHECK(std::fabs(h(r, c) - ata(rows[r], cols[c])) <= 1e-12);

  std::vector<std::size_t> all(12);
  for (std::size_t i = 0; i < 12; ++i) all[i] = i;
  const Eigen::MatrixXd full = f.hessian_block(x, all, all);
  CHECK((full - full.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  const Vector v = testing::gaussian(12, rng);
  Vector hv(12);
  f.hessian_apply(x, v, hv);
  const Eigen::VectorXd ref = ata * Eigen::Map<const Eigen::VectorXd>(v.data(), 12);
  for (std::size_t i = 0; i < 12; ++i) CHECK(std::fabs(hv[i] - ref[i]) <= 1e-10);
  CHECK(f.hessian_rank_bound() == 8);
}

TEST_CASE("alpha bar") {
  SolverParams p;
  p.lipschitz_estimate = 2.0;
  p.delta = 0.5;
  p.sigma = 0.25;
  p.recompute_alpha_bar();
  // min{(1 - 0.5) / (4 - 0.25), 2 * 0.75 * 0.5 / 2, 1}
  CHECK(p.alpha_bar == doctest::Approx(std::min(0.5 / 3.75, 0.375)));
  CHECK(count_nonzeros(Vector{0, 1e-30, -2, 0}) == 2);
}

}
