#include <string>

#include "boxl0/error.hpp"
#include "boxl0/operators.hpp"

namespace boxl0 {

ComposedMap::ComposedMap(MapPtr outer, MapPtr inner) : outer_(std::move(outer)), inner_(std::move(inner)) {
  if (!outer_ || !inner_) throw Error(ErrorCode::InvalidArgument, "null map in composition");
  if (outer_->cols() != inner_->rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "outer cols " + std::to_string(outer_->cols()) + " != inner rows " +
                    std::to_string(inner_->rows()));
  }
  if (inner_->complex_rows()) {
    throw Error(ErrorCode::InvalidArgument, "inner map of a composition must be real");
  }
}

void ComposedMap::apply_into(std::span<const double> x, std::span<double> y) const {
  Vector mid(inner_->rows());
  inner_->apply_into(x, mid);
  outer_->apply_into(mid, y);
}

void ComposedMap::adjoint_into(std::span<const double> y, std::span<double> x) const {
  Vector mid(outer_->cols());
  outer_->adjoint_into(y, mid);
  inner_->adjoint_into(mid, x);
}

void ComposedMap::column_into(std::size_t i, std::span<double> out) const {
  Vector mid(inner_->rows());
  inner_->column_into(i, mid);
  IndexList index;
  Vector value;
  for (std::size_t k = 0; k < mid.size(); ++k) {
    if (mid[k] != 0.0) {
      index.push_back(k);
      value.push_back(mid[k]);
    }
  }
  outer_->apply_sparse_into(index, value, out);
}

}  // namespace boxl0
