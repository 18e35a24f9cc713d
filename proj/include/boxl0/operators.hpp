#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace boxl0 {

using Vector = std::vector<double>;
using ComplexVector = std::vector<std::complex<double>>;
using IndexList = std::vector<std::size_t>;

// A real linear map R^n -> R^rows. Maps with complex measurements store each
// complex row as an interleaved (re, im) pair, so rows() is twice the number of
// complex rows and the real adjoint is Re(A^H y).
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual bool complex_rows() const { return false; }

  virtual void apply_into(std::span<const double> x, std::span<double> y) const = 0;
  virtual void adjoint_into(std::span<const double> y, std::span<double> x) const = 0;

  // Default: apply(e_i).
  virtual void column_into(std::size_t i, std::span<double> out) const;

  // y = A v where v is given by its nonzeros. Default densifies.
  virtual void apply_sparse_into(std::span<const std::size_t> index, std::span<const double> value,
                                 std::span<double> y) const;

  // Pointer to contiguous storage of column i when the map keeps one.
  virtual const double* column_data(std::size_t /*i*/) const { return nullptr; }

  Vector apply(std::span<const double> x) const;
  Vector adjoint_apply(std::span<const double> y) const;
  // Throws IndexOutOfRange.
  Vector column(std::size_t i) const;
};

using MapPtr = std::shared_ptr<const LinearMap>;

// Column-major dense matrix.
class DenseMap final : public LinearMap {
 public:
  DenseMap(std::size_t rows, std::size_t cols, Vector col_major);

  static DenseMap from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data);
  static DenseMap identity(std::size_t n);
  static DenseMap diagonal(std::span<const double> diag);

  std::size_t rows() const override { return rows_; }
  std::size_t cols() const override { return cols_; }

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> y, std::span<double> x) const override;
  void column_into(std::size_t i, std::span<double> out) const override;
  void apply_sparse_into(std::span<const std::size_t> index, std::span<const double> value,
                         std::span<double> y) const override;
  const double* column_data(std::size_t i) const override { return data_.data() + i * rows_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Vector data_;
};

// Row subset of the unitary DFT of length n:
//   y_j = n^{-1/2} sum_t x_t exp(-2 pi i rows[j] t / n).
class PartialDftMap final : public LinearMap {
 public:
  PartialDftMap(std::size_t n, IndexList rows);

  // Uniform row subset without replacement, sorted. With keep_dc, row 0 is always
  // present and the other m - 1 rows are drawn from 1..n-1.
  static PartialDftMap random_rows(std::size_t n, std::size_t m, std::uint64_t seed, bool keep_dc = false);

  std::size_t rows() const override { return 2 * sample_.size(); }
  std::size_t cols() const override { return n_; }
  bool complex_rows() const override { return true; }

  std::size_t num_samples() const { return sample_.size(); }
  const IndexList& sampled_rows() const { return sample_; }

  ComplexVector apply_complex(std::span<const double> x) const;
  // Full complex adjoint F^H y (length n).
  ComplexVector adjoint_complex(std::span<const std::complex<double>> y) const;

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> y, std::span<double> x) const override;
  void apply_sparse_into(std::span<const std::size_t> index, std::span<const double> value,
                         std::span<double> y) const override;

 private:
  void full_transform(ComplexVector& a, bool inverse) const;

  std::size_t n_;
  IndexList sample_;
  bool pow2_;
  ComplexVector twiddle_;  // exp(-2 pi i k / n), k < n
};

// Full-depth orthonormal 2-D Haar transform of a side x side image.
//
// Coefficients use the recursive Mallat layout in a side x side array
// flattened row-major: each level transforms the rows, then the columns, of
// the current top-left block; averages land in the first half and differences
// in the second half, so the low-low block stays top-left and the level
// recurses on it until it is 1 x 1. The DC coefficient is entry 0.
Vector haar_forward(std::span<const double> image, std::size_t side);
Vector haar_inverse(std::span<const double> coeffs, std::size_t side);

class HaarMap final : public LinearMap {
 public:
  enum class Direction { Forward, Inverse };

  HaarMap(std::size_t side, Direction direction);

  std::size_t rows() const override { return side_ * side_; }
  std::size_t cols() const override { return side_ * side_; }
  std::size_t side() const { return side_; }

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> y, std::span<double> x) const override;

 private:
  std::size_t side_;
  Direction direction_;
};

// outer . inner
class ComposedMap final : public LinearMap {
 public:
  ComposedMap(MapPtr outer, MapPtr inner);

  std::size_t rows() const override { return outer_->rows(); }
  std::size_t cols() const override { return inner_->cols(); }
  bool complex_rows() const override { return outer_->complex_rows(); }

  void apply_into(std::span<const double> x, std::span<double> y) const override;
  void adjoint_into(std::span<const double> y, std::span<double> x) const override;
  // Pushes the (typically sparse) inner column through outer.apply_sparse_into.
  void column_into(std::size_t i, std::span<double> out) const override;

 private:
  MapPtr outer_;
  MapPtr inner_;
};

// Rayleigh-quotient estimate of the largest eigenvalue of A^T A.
double power_iteration(const LinearMap& map, int iters, std::uint64_t seed);

bool is_power_of_two(std::size_t v);

namespace detail {
// In-place radix-2 FFT, unnormalized; inverse uses the +i sign. Size must be a
// power of two.
void fft_inplace(std::span<std::complex<double>> a, bool inverse);
}  // namespace detail

}  // namespace boxl0
