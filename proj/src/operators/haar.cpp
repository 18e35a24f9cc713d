#include <cmath>
#include <numbers>
#include <string>

#include "boxl0/error.hpp"
#include "boxl0/operators.hpp"

namespace boxl0 {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void check_side(std::size_t len, std::size_t side) {
  if (!is_power_of_two(side)) {
    throw Error(ErrorCode::SideNotPowerOfTwo, "image side " + std::to_string(side));
  }
  if (len != side * side) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(side * side) + " values, got " + std::to_string(len));
  }
}

// One analysis step on `count` values spaced `stride` apart.
void analyze(double* base, std::size_t count, std::size_t stride, Vector& tmp) {
  const std::size_t half = count / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const double a = base[(2 * k) * stride];
    const double b = base[(2 * k + 1) * stride];
    tmp[k] = (a + b) * kInvSqrt2;
    tmp[half + k] = (a - b) * kInvSqrt2;
  }
  for (std::size_t k = 0; k < count; ++k) base[k * stride] = tmp[k];
}

void synthesize(double* base, std::size_t count, std::size_t stride, Vector& tmp) {
  const std::size_t half = count / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const double s = base[k * stride];
    const double d = base[(half + k) * stride];
    tmp[2 * k] = (s + d) * kInvSqrt2;
    tmp[2 * k + 1] = (s - d) * kInvSqrt2;
  }
  for (std::size_t k = 0; k < count; ++k) base[k * stride] = tmp[k];
}

}  // namespace

Vector haar_forward(std::span<const double> image, std::size_t side) {
  check_side(image.size(), side);
  Vector c(image.begin(), image.end());
  Vector tmp(side);
  for (std::size_t block = side; block > 1; block /= 2) {
    for (std::size_t r = 0; r < block; ++r) analyze(c.data() + r * side, block, 1, tmp);
    for (std::size_t col = 0; col < block; ++col) analyze(c.data() + col, block, side, tmp);
  }
  return c;
}

Vector haar_inverse(std::span<const double> coeffs, std::size_t side) {
  check_side(coeffs.size(), side);
  Vector img(coeffs.begin(), coeffs.end());
  Vector tmp(side);
  for (std::size_t block = 2; block <= side; block *= 2) {
    for (std::size_t col = 0; col < block; ++col) synthesize(img.data() + col, block, side, tmp);
    for (std::size_t r = 0; r < block; ++r) synthesize(img.data() + r * side, block, 1, tmp);
  }
  return img;
}

HaarMap::HaarMap(std::size_t side, Direction direction) : side_(side), direction_(direction) {
  if (!is_power_of_two(side)) {
    throw Error(ErrorCode::SideNotPowerOfTwo, "image side " + std::to_string(side));
  }
}

void HaarMap::apply_into(std::span<const double> x, std::span<double> y) const {
  const Vector out = direction_ == Direction::Forward ? haar_forward(x, side_) : haar_inverse(x, side_);
  std::copy(out.begin(), out.end(), y.begin());
}

void HaarMap::adjoint_into(std::span<const double> y, std::span<double> x) const {
  const Vector out = direction_ == Direction::Forward ? haar_inverse(y, side_) : haar_forward(y, side_);
  std::copy(out.begin(), out.end(), x.begin());
}

}  // namespace boxl0
