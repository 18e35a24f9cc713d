#include <algorithm>
#include <string>

#include "boxl0/error.hpp"
#include "boxl0/kernels.hpp"
#include "boxl0/operators.hpp"

namespace boxl0 {

DenseMap::DenseMap(std::size_t rows, std::size_t cols, Vector col_major)
    : rows_(rows), cols_(cols), data_(std::move(col_major)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::DimensionMismatch,
                "dense map storage " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseMap DenseMap::from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data) {
  if (data.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch, "row-major data does not match shape");
  }
  Vector cm(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) cm[c * rows + r] = data[r * cols + c];
  }
  return DenseMap(rows, cols, std::move(cm));
}

DenseMap DenseMap::identity(std::size_t n) {
  Vector cm(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) cm[i * n + i] = 1.0;
  return DenseMap(n, n, std::move(cm));
}

DenseMap DenseMap::diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  Vector cm(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) cm[i * n + i] = diag[i];
  return DenseMap(n, n, std::move(cm));
}

void DenseMap::apply_into(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  const auto& k = kernels::active();
  for (std::size_t c = 0; c < cols_; ++c) {
    if (x[c] != 0.0) k.axpy(x[c], column_data(c), y.data(), rows_);
  }
}

void DenseMap::adjoint_into(std::span<const double> y, std::span<double> x) const {
  const auto& k = kernels::active();
  for (std::size_t c = 0; c < cols_; ++c) x[c] = k.dot(column_data(c), y.data(), rows_);
}

void DenseMap::column_into(std::size_t i, std::span<double> out) const {
  std::copy_n(column_data(i), rows_, out.begin());
}

void DenseMap::apply_sparse_into(std::span<const std::size_t> index, std::span<const double> value,
                                 std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (value[j] != 0.0) k.axpy(value[j], column_data(index[j]), y.data(), rows_);
  }
}

}  // namespace boxl0
