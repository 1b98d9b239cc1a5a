#pragma once

#include <Eigen/Dense>

#include "ampforge/tensor.hpp"

namespace ampforge::detail {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMatrix> as_matrix(const ComplexTensor& t) {
  return {t.storage().data(), static_cast<Eigen::Index>(t.rows()),
          static_cast<Eigen::Index>(t.cols())};
}

inline Eigen::Map<RowMatrix> as_matrix(ComplexTensor& t) {
  return {t.storage().data(), static_cast<Eigen::Index>(t.rows()),
          static_cast<Eigen::Index>(t.cols())};
}

template <typename Derived>
ComplexTensor to_tensor(const Eigen::MatrixBase<Derived>& m) {
  ComplexTensor out({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  as_matrix(out) = m;
  return out;
}

}  // namespace ampforge::detail
