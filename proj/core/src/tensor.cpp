#include "ampforge/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "ampforge/error.hpp"
#include "eigen_bridge.hpp"

namespace ampforge {

namespace {

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

void require_matrix(const ComplexTensor& t, const char* what) {
  if (t.rank() != 2) fail(ErrorCode::ShapeMismatch, std::string(what) + " expects a 2-D tensor");
}

}  // namespace

std::size_t shape_product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

ComplexTensor::ComplexTensor(Shape shape) : shape_(std::move(shape)), data_(shape_product(shape_)) {}

ComplexTensor::ComplexTensor(Shape shape, std::vector<Complex> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    fail(ErrorCode::ShapeMismatch, "shape " + shape_string(shape_) + " does not hold " +
                                       std::to_string(data_.size()) + " elements");
  }
}

ComplexTensor ComplexTensor::identity(std::size_t n) {
  ComplexTensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

ComplexTensor ComplexTensor::zeros(std::size_t rows, std::size_t cols) { return ComplexTensor({rows, cols}); }

ComplexTensor ComplexTensor::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<Complex> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) fail(ErrorCode::ShapeMismatch, "ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return ComplexTensor({r, c}, std::move(data));
}

std::size_t ComplexTensor::rows() const {
  require_matrix(*this, "rows()");
  return shape_[0];
}

std::size_t ComplexTensor::cols() const {
  require_matrix(*this, "cols()");
  return shape_[1];
}

std::size_t ComplexTensor::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) fail(ErrorCode::ShapeMismatch, "index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= shape_[i]) fail(ErrorCode::IndexOutOfRange, "tensor index out of range");
    flat = flat * shape_[i] + index[i];
  }
  return flat;
}

Complex& ComplexTensor::at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }
const Complex& ComplexTensor::at(std::span<const std::size_t> index) const { return data_[flat_index(index)]; }

ComplexTensor ComplexTensor::adjoint() const {
  require_matrix(*this, "adjoint");
  ComplexTensor out({shape_[1], shape_[0]});
  for (std::size_t i = 0; i < shape_[0]; ++i)
    for (std::size_t j = 0; j < shape_[1]; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexTensor ComplexTensor::transpose() const {
  require_matrix(*this, "transpose");
  ComplexTensor out({shape_[1], shape_[0]});
  for (std::size_t i = 0; i < shape_[0]; ++i)
    for (std::size_t j = 0; j < shape_[1]; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexTensor ComplexTensor::conj() const {
  ComplexTensor out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

double ComplexTensor::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& z : data_) acc += std::norm(z);
  return std::sqrt(acc);
}

Complex ComplexTensor::trace() const {
  require_matrix(*this, "trace");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < std::min(shape_[0], shape_[1]); ++i) acc += (*this)(i, i);
  return acc;
}

ComplexTensor& ComplexTensor::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexTensor& ComplexTensor::operator+=(const ComplexTensor& other) {
  if (other.shape_ != shape_) fail(ErrorCode::ShapeMismatch, "tensor addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexTensor& ComplexTensor::operator-=(const ComplexTensor& other) {
  if (other.shape_ != shape_) fail(ErrorCode::ShapeMismatch, "tensor subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexTensor operator*(Complex s, ComplexTensor t) { return t *= s; }
ComplexTensor operator+(ComplexTensor a, const ComplexTensor& b) { return a += b; }
ComplexTensor operator-(ComplexTensor a, const ComplexTensor& b) { return a -= b; }

ComplexTensor reshape(const ComplexTensor& t, Shape new_shape) {
  if (shape_product(new_shape) != t.size()) {
    fail(ErrorCode::ShapeMismatch, "cannot reshape " + shape_string(t.shape()) + " to " +
                                       shape_string(new_shape));
  }
  return ComplexTensor(std::move(new_shape), t.storage());
}

SvdResult svd(const ComplexTensor& a, std::optional<std::size_t> max_rank, double tol) {
  require_matrix(a, "svd");
  if (tol < 0.0) fail(ErrorCode::InvalidArgument, "svd tolerance must be non-negative");
  const auto m = detail::as_matrix(a);
  Eigen::BDCSVD<detail::RowMatrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "SVD did not converge");
  const auto& sv = dec.singularValues();
  const auto full = static_cast<std::size_t>(sv.size());

  std::size_t keep = 0;
  const double smax = full ? sv(0) : 0.0;
  for (std::size_t i = 0; i < full; ++i) {
    if (sv(static_cast<Eigen::Index>(i)) > tol * smax) ++keep;
  }
  if (max_rank) keep = std::min(keep, *max_rank);
  keep = std::max<std::size_t>(keep, std::min<std::size_t>(full, 1));

  SvdResult out;
  out.s.resize(keep);
  for (std::size_t i = 0; i < keep; ++i) out.s[i] = sv(static_cast<Eigen::Index>(i));
  for (std::size_t i = keep; i < full; ++i) {
    const double x = sv(static_cast<Eigen::Index>(i));
    out.discarded_weight += x * x;
  }
  const auto k = static_cast<Eigen::Index>(keep);
  out.u = detail::to_tensor(dec.matrixU().leftCols(k));
  out.vdag = detail::to_tensor(dec.matrixV().leftCols(k).adjoint());
  return out;
}

EigResult eig_hermitian(const ComplexTensor& a) {
  require_matrix(a, "eig_hermitian");
  if (a.rows() != a.cols()) fail(ErrorCode::ShapeMismatch, "eig_hermitian expects a square matrix");
  const auto m = detail::as_matrix(a);
  const double norm = m.norm();
  if ((m - m.adjoint()).norm() > 1e-8 * std::max(norm, 1e-300)) {
    fail(ErrorCode::NotHermitian, "matrix is not Hermitian");
  }
  const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "eigensolver did not converge");

  const auto n = static_cast<std::size_t>(sym.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return vals(static_cast<Eigen::Index>(x)) > vals(static_cast<Eigen::Index>(y));
  });

  EigResult out;
  out.values.resize(n);
  out.vectors = ComplexTensor({n, n});
  for (std::size_t c = 0; c < n; ++c) {
    const auto src = static_cast<Eigen::Index>(order[c]);
    out.values[c] = vals(src);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = solver.eigenvectors()(static_cast<Eigen::Index>(r), src);
  }
  return out;
}

QrResult qr(const ComplexTensor& a) {
  require_matrix(a, "qr");
  const auto m = detail::as_matrix(a);
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<detail::RowMatrix> dec(m);
  detail::RowMatrix q = dec.householderQ() * detail::RowMatrix::Identity(m.rows(), k);
  detail::RowMatrix r = dec.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return {detail::to_tensor(q), detail::to_tensor(r)};
}

ComplexTensor matmul(const ComplexTensor& a, const ComplexTensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  if (a.cols() != b.rows()) {
    fail(ErrorCode::ShapeMismatch, "matmul " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  return detail::to_tensor(detail::as_matrix(a) * detail::as_matrix(b));
}

ComplexTensor kron(const ComplexTensor& a, const ComplexTensor& b) {
  require_matrix(a, "kron");
  require_matrix(b, "kron");
  const std::size_t ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  ComplexTensor out({ar * br, ac * bc});
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out(i * br + k, j * bc + l) = a(i, j) * b(k, l);
  return out;
}

ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  std::vector<bool> a_summed(a.rank(), false), b_summed(b.rank(), false);
  for (const auto& [i, j] : pairs) {
    if (i >= a.rank() || j >= b.rank()) fail(ErrorCode::ShapeMismatch, "contraction axis out of range");
    if (a_summed[i] || b_summed[j]) fail(ErrorCode::ShapeMismatch, "axis contracted twice");
    if (a.dim(i) != b.dim(j)) {
      fail(ErrorCode::ShapeMismatch, "contracted dimensions differ: " + std::to_string(a.dim(i)) +
                                         " vs " + std::to_string(b.dim(j)));
    }
    a_summed[i] = b_summed[j] = true;
  }

  // Permute a to (free_a, summed) and b to (summed, free_b), then one matmul.
  std::vector<std::size_t> a_free, b_free, a_sum, b_sum;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (!a_summed[i]) a_free.push_back(i);
  for (std::size_t j = 0; j < b.rank(); ++j)
    if (!b_summed[j]) b_free.push_back(j);
  for (const auto& [i, j] : pairs) {
    a_sum.push_back(i);
    b_sum.push_back(j);
  }

  auto permute = [](const ComplexTensor& t, const std::vector<std::size_t>& axes) {
    Shape new_shape;
    for (auto ax : axes) new_shape.push_back(t.dim(ax));
    ComplexTensor out(new_shape);
    const std::size_t rank = t.rank();
    std::vector<std::size_t> src_stride(rank, 1);
    for (std::size_t i = rank; i-- > 1;) src_stride[i - 1] = src_stride[i] * t.dim(i);
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      std::size_t src = 0;
      for (std::size_t k = 0; k < rank; ++k) src += idx[k] * src_stride[axes[k]];
      out[flat] = t[src];
      for (std::size_t k = rank; k-- > 0;) {
        if (++idx[k] < new_shape[k]) break;
        idx[k] = 0;
      }
    }
    return out;
  };

  std::vector<std::size_t> a_axes = a_free, b_axes = b_sum;
  a_axes.insert(a_axes.end(), a_sum.begin(), a_sum.end());
  b_axes.insert(b_axes.end(), b_free.begin(), b_free.end());

  std::size_t m = 1, k = 1, n = 1;
  Shape out_shape;
  for (auto i : a_free) {
    m *= a.dim(i);
    out_shape.push_back(a.dim(i));
  }
  for (auto i : a_sum) k *= a.dim(i);
  for (auto j : b_free) {
    n *= b.dim(j);
    out_shape.push_back(b.dim(j));
  }

  const ComplexTensor ap = reshape(permute(a, a_axes), {m, k});
  const ComplexTensor bp = reshape(permute(b, b_axes), {k, n});
  return ComplexTensor(out_shape, matmul(ap, bp).storage());
}

double unitarity_error(const ComplexTensor& u) {
  require_matrix(u, "unitarity_error");
  if (u.rows() != u.cols()) return INFINITY;
  const auto m = detail::as_matrix(u);
  const Eigen::MatrixXcd d = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexTensor& u, double tol) { return unitarity_error(u) <= tol; }

double phase_insensitive_distance(const ComplexTensor& a, const ComplexTensor& b) {
  if (a.shape() != b.shape()) fail(ErrorCode::ShapeMismatch, "phase_insensitive_distance");
  Complex overlap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(a[i]) * b[i];
  return 1.0 - std::abs(overlap) / static_cast<double>(a.rows());
}

double operator_distance_up_to_phase(const ComplexTensor& a, const ComplexTensor& b) {
  if (a.shape() != b.shape()) fail(ErrorCode::ShapeMismatch, "operator_distance_up_to_phase");
  Complex overlap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(a[i]) * b[i];
  const Complex phase = std::abs(overlap) > 0 ? std::conj(overlap) / std::abs(overlap) : Complex(1.0);
  const Eigen::MatrixXcd diff = detail::as_matrix(a) - phase * detail::as_matrix(b);
  Eigen::JacobiSVD<Eigen::MatrixXcd> dec(diff);
  return dec.singularValues().size() ? dec.singularValues()(0) : 0.0;
}

}  // namespace ampforge
