#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the operators and solvers. Every kernel has
// a portable scalar reference; wider variants are picked once at runtime from
// the CPU feature set and must agree with the reference (bitwise for
// elementwise kernels, to round-off for reductions).
//
// Box arguments follow the library convention: the feasible interval for
// component i is [-lower[i], upper[i]] with lower[i], upper[i] > 0.

namespace boxl0::kernels {

struct KernelTable {
  const char* name;

  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  double (*dist_sq)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = x - step * g, computed as a product followed by a subtraction
  void (*grad_step)(const double* x, const double* g, double step, double* out, std::size_t n);
  // out = clamp(z, -lower, upper)
  void (*clamp_box)(const double* z, const double* lower, const double* upper, double* out,
                    std::size_t n);
  // Closed-form box-constrained hard threshold; keeps z when |z| >= threshold.
  void (*hard_threshold_box)(const double* z, double threshold, const double* lower,
                             const double* upper, double* out, std::size_t n);
  // clamp(sign(z) * max(|z| - shrink, 0), -lower, upper)
  void (*soft_threshold_box)(const double* z, double shrink, const double* lower,
                             const double* upper, double* out, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the features.
const KernelTable* avx2_table();

// The table used by the library. Chosen on first use: the widest supported
// variant, unless BOXL0_SIMD=scalar is set in the environment.
const KernelTable& active();

// Forces the active table (tests and the selftest command use this).
void set_active(const KernelTable& table);

bool select_by_name(std::string_view name);

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline double sum_sq(const double* x, std::size_t n) { return active().sum_sq(x, n); }
inline double dist_sq(const double* x, const double* y, std::size_t n) {
  return active().dist_sq(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }

}  // namespace boxl0::kernels
