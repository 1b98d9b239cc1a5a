#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ampforge {

using Complex = std::complex<double>;
using Shape = std::vector<std::size_t>;

/// Dense complex tensor stored flat in row-major order.
///
/// Every module in the library relies on the row-major contract: reshaping
/// only reinterprets the shape and never moves data.
class ComplexTensor {
 public:
  ComplexTensor() = default;
  explicit ComplexTensor(Shape shape);
  ComplexTensor(Shape shape, std::vector<Complex> data);

  static ComplexTensor identity(std::size_t n);
  static ComplexTensor zeros(std::size_t rows, std::size_t cols);
  /// Builds a 2-D tensor from nested rows; all rows must have equal length.
  static ComplexTensor from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

  std::size_t rows() const;
  std::size_t cols() const;

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }
  std::vector<Complex>& storage() noexcept { return data_; }
  const std::vector<Complex>& storage() const noexcept { return data_; }

  Complex& operator[](std::size_t flat) { return data_[flat]; }
  const Complex& operator[](std::size_t flat) const { return data_[flat]; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  Complex& at(std::span<const std::size_t> index);
  const Complex& at(std::span<const std::size_t> index) const;

  ComplexTensor adjoint() const;
  ComplexTensor transpose() const;
  ComplexTensor conj() const;
  double frobenius_norm() const;
  Complex trace() const;

  ComplexTensor& operator*=(Complex s);
  ComplexTensor& operator+=(const ComplexTensor& other);
  ComplexTensor& operator-=(const ComplexTensor& other);

  friend bool operator==(const ComplexTensor&, const ComplexTensor&) = default;

 private:
  std::size_t flat_index(std::span<const std::size_t> index) const;

  Shape shape_;
  std::vector<Complex> data_;
};

ComplexTensor operator*(Complex s, ComplexTensor t);
ComplexTensor operator+(ComplexTensor a, const ComplexTensor& b);
ComplexTensor operator-(ComplexTensor a, const ComplexTensor& b);

std::size_t shape_product(const Shape& shape);

ComplexTensor reshape(const ComplexTensor& t, Shape new_shape);

struct SvdResult {
  ComplexTensor u;        // m x r
  std::vector<double> s;  // descending, non-negative
  ComplexTensor vdag;     // r x n
  double discarded_weight = 0.0;
};

/// Thin SVD with optional truncation. Keeps r = min(max_rank, #{s_i > tol * s_max})
/// singular values (at least one) and reports the squared weight that was dropped.
SvdResult svd(const ComplexTensor& a, std::optional<std::size_t> max_rank = std::nullopt,
              double tol = 0.0);

struct EigResult {
  std::vector<double> values;  // descending
  ComplexTensor vectors;       // eigenvectors as columns, same order as values
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrised before
/// decomposing; inputs further than 1e-8 (relative Frobenius) from Hermitian
/// are rejected with NotHermitian. Ties keep the backend order.
EigResult eig_hermitian(const ComplexTensor& a);

struct QrResult {
  ComplexTensor q;  // m x k, orthonormal columns
  ComplexTensor r;  // k x n
};

/// Thin QR, k = min(m, n).
QrResult qr(const ComplexTensor& a);

ComplexTensor matmul(const ComplexTensor& a, const ComplexTensor& b);
ComplexTensor kron(const ComplexTensor& a, const ComplexTensor& b);

/// General pairwise contraction. Each pair (i, j) sums axis i of `a` against
/// axis j of `b`. The result carries the free axes of `a` followed by the free
/// axes of `b`, each in their original order.
ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Max-abs deviation of u^dagger u from the identity.
double unitarity_error(const ComplexTensor& u);
bool is_unitary(const ComplexTensor& u, double tol = 1e-10);

/// 1 - |tr(a^dagger b)| / dim: zero iff a and b agree up to global phase.
double phase_insensitive_distance(const ComplexTensor& a, const ComplexTensor& b);

/// Operator-norm distance min_phi ||a - e^{i phi} b||_2, with phi taken from
/// the trace overlap.
double operator_distance_up_to_phase(const ComplexTensor& a, const ComplexTensor& b);

}  // namespace ampforge
