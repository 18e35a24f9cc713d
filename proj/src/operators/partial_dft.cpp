#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "boxl0/error.hpp"
#include "boxl0/operators.hpp"

namespace boxl0 {

PartialDftMap::PartialDftMap(std::size_t n, IndexList rows)
    : n_(n), sample_(std::move(rows)), pow2_(is_power_of_two(n)), twiddle_(n) {
  if (n_ == 0) throw Error(ErrorCode::BadShape, "DFT length must be positive");
  std::sort(sample_.begin(), sample_.end());
  if (std::adjacent_find(sample_.begin(), sample_.end()) != sample_.end()) {
    throw Error(ErrorCode::InvalidArgument, "DFT rows must be distinct");
  }
  if (!sample_.empty() && sample_.back() >= n_) {
    throw Error(ErrorCode::IndexOutOfRange, "DFT row " + std::to_string(sample_.back()));
  }
  for (std::size_t k = 0; k < n_; ++k) {
    const double t = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_);
    twiddle_[k] = {std::cos(t), std::sin(t)};
  }
}

PartialDftMap PartialDftMap::random_rows(std::size_t n, std::size_t m, std::uint64_t seed, bool keep_dc) {
  if (m > n) throw Error(ErrorCode::BadShape, "more DFT rows than signal length");
  if (keep_dc && m == 0) throw Error(ErrorCode::BadShape, "keeping row 0 needs m >= 1");
  const std::size_t first = keep_dc ? 1 : 0;
  IndexList all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; std::shuffle is not specified bit-for-bit across libraries.
  for (std::size_t i = first; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(m);
  return PartialDftMap(n, std::move(all));
}

void PartialDftMap::full_transform(ComplexVector& a, bool inverse) const {
  if (pow2_) {
    detail::fft_inplace(a, inverse);
    return;
  }
  ComplexVector out(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t t = 0; t < n_; ++t) {
      const auto w = twiddle_[(k * t) % n_];
      s += a[t] * (inverse ? std::conj(w) : w);
    }
    out[k] = s;
  }
  a = std::move(out);
}

ComplexVector PartialDftMap::apply_complex(std::span<const double> x) const {
  ComplexVector a(x.begin(), x.end());
  full_transform(a, false);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  ComplexVector y(sample_.size());
  for (std::size_t j = 0; j < sample_.size(); ++j) y[j] = a[sample_[j]] * scale;
  return y;
}

ComplexVector PartialDftMap::adjoint_complex(std::span<const std::complex<double>> y) const {
  ComplexVector a(n_, 0.0);
  for (std::size_t j = 0; j < sample_.size(); ++j) a[sample_[j]] = y[j];
  full_transform(a, true);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (auto& v : a) v *= scale;
  return a;
}

void PartialDftMap::apply_into(std::span<const double> x, std::span<double> y) const {
  const ComplexVector c = apply_complex(x);
  for (std::size_t j = 0; j < c.size(); ++j) {
    y[2 * j] = c[j].real();
    y[2 * j + 1] = c[j].imag();
  }
}

void PartialDftMap::adjoint_into(std::span<const double> y, std::span<double> x) const {
  ComplexVector c(sample_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = {y[2 * j], y[2 * j + 1]};
  const ComplexVector full = adjoint_complex(c);
  for (std::size_t t = 0; t < n_; ++t) x[t] = full[t].real();
}

void PartialDftMap::apply_sparse_into(std::span<const std::size_t> index,
                                      std::span<const double> value, std::span<double> y) const {
  // Direct sum over the nonzeros: O(m * nnz), cheaper than a full FFT for the
  // localized Haar atoms extracted as Hessian columns.
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (std::size_t j = 0; j < sample_.size(); ++j) {
    const std::size_t row = sample_[j];
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) {
      s += value[k] * twiddle_[(row * index[k]) % n_];
    }
    y[2 * j] = s.real() * scale;
    y[2 * j + 1] = s.imag() * scale;
  }
}

}  // namespace boxl0
