#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "boxl0/kernels.hpp"
#include "support.hpp"

using namespace boxl0;
using boxl0::testing::Rng;

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
  const auto& k = kernels::scalar_table();
  const double x[] = {1.0, -2.0, 3.0};
  const double y[] = {4.0, 0.5, -1.0};
  CHECK(k.dot(x, y, 3) == doctest::Approx(4.0 - 1.0 - 3.0));
  CHECK(k.sum_sq(x, 3) == doctest::Approx(14.0));
  CHECK(k.dist_sq(x, y, 3) == doctest::Approx(9.0 + 6.25 + 16.0));

  const double lo[] = {1.0, 1.0, 1.0};
  const double up[] = {1.0, 1.0, 1.0};
  const double z[] = {0.5, -1.5, 0.1};
  double out[3];
  k.hard_threshold_box(z, 0.2, lo, up, out, 3);
  CHECK(out[0] == 0.5);
  CHECK(out[1] == -1.0);
  CHECK(out[2] == 0.0);
  k.soft_threshold_box(z, 0.2, lo, up, out, 3);
  CHECK(out[0] == doctest::Approx(0.3));
  CHECK(out[1] == -1.0);
  CHECK(out[2] == 0.0);
}

TEST_CASE("bound hits take precedence over a threshold larger than the bound") {
  const auto& k = kernels::scalar_table();
  const double lo[] = {0.3, 0.3};
  const double up[] = {0.3, 0.3};
  const double z[] = {0.35, -0.31};
  double out[2];
  k.hard_threshold_box(z, 0.4, lo, up, out, 2);
  CHECK(out[0] == 0.3);
  CHECK(out[1] == -0.3);
}

TEST_CASE("wide variant agrees with the scalar reference") {
  const kernels::KernelTable* wide = kernels::avx2_table();
  if (wide == nullptr) {
    MESSAGE("no AVX2 on this CPU");
    return;
  }
  const auto& ref = kernels::scalar_table();
  Rng rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 13u, 64u, 1001u}) {
    const Vector x = testing::gaussian(n, rng);
    const Vector y = testing::gaussian(n, rng);
    Vector lo(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = testing::uniform(rng, 0.1, 1.5);
      up[i] = testing::uniform(rng, 0.1, 1.5);
    }
    const double scale = std::max(1.0, ref.sum_sq(x.data(), n));
    CHECK(std::fabs(ref.dot(x.data(), y.data(), n) - wide->dot(x.data(), y.data(), n)) <= 1e-12 * scale);
    CHECK(std::fabs(ref.sum_sq(x.data(), n) - wide->sum_sq(x.data(), n)) <= 1e-12 * scale);
    CHECK(std::fabs(ref.dist_sq(x.data(), y.data(), n) - wide->dist_sq(x.data(), y.data(), n)) <= 1e-12 * scale);

    Vector a = y, b = y;
    ref.axpy(-0.3, x.data(), a.data(), n);
    wide->axpy(-0.3, x.data(), b.data(), n);
    CHECK(a == b);
    ref.grad_step(x.data(), y.data(), 0.7, a.data(), n);
    wide->grad_step(x.data(), y.data(), 0.7, b.data(), n);
    CHECK(a == b);
    ref.clamp_box(x.data(), lo.data(), up.data(), a.data(), n);
    wide->clamp_box(x.data(), lo.data(), up.data(), b.data(), n);
    CHECK(a == b);
    for (double thr : {0.05, 0.5, 1.2}) {
      ref.hard_threshold_box(x.data(), thr, lo.data(), up.data(), a.data(), n);
      wide->hard_threshold_box(x.data(), thr, lo.data(), up.data(), b.data(), n);
      CHECK(a == b);
      ref.soft_threshold_box(x.data(), thr, lo.data(), up.data(), a.data(), n);
      wide->soft_threshold_box(x.data(), thr, lo.data(), up.data(), b.data(), n);
      CHECK(a == b);
    }
  }
}

TEST_CASE("active table can be forced by name") {
  const kernels::KernelTable& before = kernels::active();
  CHECK(kernels::select_by_name("scalar"));
  CHECK(std::string(kernels::active().name) == "scalar");
  CHECK_FALSE(kernels::select_by_name("neon"));
  kernels::set_active(before);
}

}
