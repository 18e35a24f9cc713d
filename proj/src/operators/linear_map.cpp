#include <string>

#include "boxl0/error.hpp"
#include "boxl0/operators.hpp"

namespace boxl0 {

void LinearMap::column_into(std::size_t i, std::span<double> out) const {
  Vector e(cols(), 0.0);
  e[i] = 1.0;
  apply_into(e, out);
}

void LinearMap::apply_sparse_into(std::span<const std::size_t> index, std::span<const double> value,
                                  std::span<double> y) const {
  Vector dense(cols(), 0.0);
  for (std::size_t k = 0; k < index.size(); ++k) dense[index[k]] = value[k];
  apply_into(dense, y);
}

Vector LinearMap::apply(std::span<const double> x) const {
  if (x.size() != cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "apply: input length " + std::to_string(x.size()) + " != " + std::to_string(cols()));
  }
  Vector y(rows());
  apply_into(x, y);
  return y;
}

Vector LinearMap::adjoint_apply(std::span<const double> y) const {
  if (y.size() != rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "adjoint: input length " + std::to_string(y.size()) + " != " + std::to_string(rows()));
  }
  Vector x(cols());
  adjoint_into(y, x);
  return x;
}

Vector LinearMap::column(std::size_t i) const {
  if (i >= cols()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "column " + std::to_string(i) + " of " + std::to_string(cols()));
  }
  Vector out(rows());
  column_into(i, out);
  return out;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace boxl0
