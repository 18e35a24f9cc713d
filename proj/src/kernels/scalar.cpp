#include <cmath>

#include "boxl0/kernels.hpp"

namespace boxl0::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_sq_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double dist_sq_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void grad_step_scalar(const double* x, const double* g, double step, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = step * g[i];
    out[i] = x[i] - t;
  }
}

void clamp_box_scalar(const double* z, const double* lower, const double* upper, double* out,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = z[i];
    if (v >= upper[i]) {
      v = upper[i];
    } else if (v <= -lower[i]) {
      v = -lower[i];
    }
    out[i] = v;
  }
}

void hard_threshold_box_scalar(const double* z, double threshold, const double* lower,
                               const double* upper, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = z[i];
    if (v >= upper[i]) {
      out[i] = upper[i];
    } else if (v <= -lower[i]) {
      out[i] = -lower[i];
    } else if (std::fabs(v) >= threshold) {
      out[i] = v;
    } else {
      out[i] = 0.0;
    }
  }
}

void soft_threshold_box_scalar(const double* z, double shrink, const double* lower,
                               const double* upper, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::fabs(z[i]) - shrink;
    double v = mag > 0.0 ? std::copysign(mag, z[i]) : 0.0;
    if (v >= upper[i]) {
      v = upper[i];
    } else if (v <= -lower[i]) {
      v = -lower[i];
    }
    out[i] = v;
  }
}

constexpr KernelTable kScalar{
    "scalar",           dot_scalar,          sum_sq_scalar,
    dist_sq_scalar,     axpy_scalar,         grad_step_scalar,
    clamp_box_scalar,   hard_threshold_box_scalar, soft_threshold_box_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace boxl0::kernels
