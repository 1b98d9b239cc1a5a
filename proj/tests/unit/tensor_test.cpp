#include <gtest/gtest.h>

#include <random>

#include "ampforge/error.hpp"
#include "ampforge/tensor.hpp"
#include "oracles.hpp"

using namespace ampforge;

namespace {

ComplexTensor random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  return ComplexTensor({r, c}, oracle::gaussian_vector(r * c, rng));
}

double max_abs_diff(const ComplexTensor& a, const ComplexTensor& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(Tensor, ShapeMustMatchData) {
  EXPECT_THROW(ComplexTensor({2, 3}, std::vector<Complex>(5)), Error);
  const ComplexTensor t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
}

TEST(Tensor, ReshapeKeepsRowMajorOrder) {
  std::vector<Complex> d(6);
  for (std::size_t i = 0; i < 6; ++i) d[i] = static_cast<double>(i);
  const ComplexTensor t({2, 3}, d);
  const ComplexTensor r = reshape(t, {3, 2});
  EXPECT_EQ(r(2, 1), Complex(5.0));
  EXPECT_EQ(r(1, 0), Complex(2.0));
  try {
    reshape(t, {4, 2});
    FAIL() << "expected ShapeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Tensor, MatmulAndKronMatchLoops) {
  std::mt19937_64 rng(1);
  const auto a = random_matrix(3, 4, rng), b = random_matrix(4, 2, rng);
  EXPECT_LT(max_abs_diff(matmul(a, b), oracle::dense_matmul(a, b)), 1e-12);
  const auto c = random_matrix(2, 2, rng);
  EXPECT_LT(max_abs_diff(kron(a, c), oracle::dense_kron(a, c)), 1e-12);
}

TEST(Tensor, ContractSumsPairedAxes) {
  std::mt19937_64 rng(2);
  const ComplexTensor a({2, 3, 4}, oracle::gaussian_vector(24, rng));
  const ComplexTensor b({4, 3, 5}, oracle::gaussian_vector(60, rng));
  const std::pair<std::size_t, std::size_t> pairs[] = {{1, 1}, {2, 0}};
  const ComplexTensor c = contract(a, b, pairs);
  ASSERT_EQ(c.shape(), (Shape{2, 5}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t l = 0; l < 5; ++l) {
      Complex expect = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 4; ++k) expect += a[(i * 3 + j) * 4 + k] * b[(k * 3 + j) * 5 + l];
      EXPECT_LT(std::abs(c(i, l) - expect), 1e-12);
    }
}

TEST(Tensor, SvdReconstructsAndOrdersValues) {
  std::mt19937_64 rng(3);
  const auto a = random_matrix(6, 4, rng);
  const SvdResult r = svd(a);
  ASSERT_EQ(r.s.size(), 4u);
  for (std::size_t i = 1; i < r.s.size(); ++i) EXPECT_GE(r.s[i - 1], r.s[i]);
  ComplexTensor us = r.u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= r.s[j];
  EXPECT_LT(max_abs_diff(oracle::dense_matmul(us, r.vdag), a), 1e-12);
  EXPECT_DOUBLE_EQ(r.discarded_weight, 0.0);
}

TEST(Tensor, SvdTruncationReportsDroppedWeight) {
  std::mt19937_64 rng(4);
  const auto a = random_matrix(5, 5, rng);
  const SvdResult full = svd(a);
  const SvdResult cut = svd(a, 2);
  ASSERT_EQ(cut.s.size(), 2u);
  double dropped = 0.0;
  for (std::size_t i = 2; i < full.s.size(); ++i) dropped += full.s[i] * full.s[i];
  EXPECT_NEAR(cut.discarded_weight, dropped, 1e-10);
}

TEST(Tensor, SvdRelativeToleranceDropsTinyValues) {
  ComplexTensor a = ComplexTensor::zeros(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-14;
  EXPECT_EQ(svd(a, std::nullopt, 1e-12).s.size(), 1u);
  EXPECT_EQ(svd(ComplexTensor::zeros(2, 2), std::nullopt, 1e-12).s.size(), 1u);
}

TEST(Tensor, EigHermitianDescendingAndRejectsNonHermitian) {
  std::mt19937_64 rng(5);
  const auto x = random_matrix(4, 4, rng);
  const ComplexTensor h = oracle::dense_matmul(x, x.adjoint());
  const EigResult e = eig_hermitian(h);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<Complex> v(4);
    for (std::size_t r = 0; r < 4; ++r) v[r] = e.vectors(r, i);
    const auto hv = oracle::apply_dense(h, v);
    for (std::size_t r = 0; r < 4; ++r) EXPECT_LT(std::abs(hv[r] - e.values[i] * v[r]), 1e-10);
  }
  try {
    eig_hermitian(x);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotHermitian);
  }
}

TEST(Tensor, QrIsOrthonormalTimesUpperTriangular) {
  std::mt19937_64 rng(6);
  const auto a = random_matrix(5, 3, rng);
  const QrResult f = qr(a);
  EXPECT_LT(max_abs_diff(oracle::dense_matmul(f.q, f.r), a), 1e-12);
  EXPECT_LT(max_abs_diff(oracle::dense_matmul(f.q.adjoint(), f.q), ComplexTensor::identity(3)), 1e-12);
  for (std::size_t i = 0; i < f.r.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) EXPECT_LT(std::abs(f.r(i, j)), 1e-12);
}

TEST(Tensor, UnitarityAndPhaseDistances) {
  std::mt19937_64 rng(7);
  const auto u = oracle::random_unitary(4, rng);
  EXPECT_TRUE(is_unitary(u));
  EXPECT_FALSE(is_unitary(random_matrix(4, 4, rng)));
  const ComplexTensor v = std::polar(1.0, 0.7) * u;
  EXPECT_LT(phase_insensitive_distance(u, v), 1e-12);
  EXPECT_LT(operator_distance_up_to_phase(u, v), 1e-12);
  EXPECT_GT(operator_distance_up_to_phase(u, oracle::random_unitary(4, rng)), 1e-3);
}
