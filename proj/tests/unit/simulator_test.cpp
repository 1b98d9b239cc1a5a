#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "ampforge/error.hpp"
#include "ampforge/simulator.hpp"
#include "oracles.hpp"

using namespace ampforge;

namespace {

constexpr double kPi = std::numbers::pi;

Gate random_gate(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<std::size_t> qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const std::size_t a = qubit(rng);
  std::size_t b = qubit(rng);
  while (b == a) b = qubit(rng);
  switch (kind(rng)) {
    case 0: return Gate::rx(a, angle(rng));
    case 1: return Gate::ry(a, angle(rng));
    case 2: return Gate::rz(a, angle(rng));
    case 3: return Gate::cnot(a, b);
    case 4: return Gate::unitary(oracle::random_unitary(4, rng), {a, b});
    default: {
      std::size_t c = qubit(rng);
      while (c == a || c == b) c = qubit(rng);
      return Gate::unitary(oracle::random_unitary(8, rng), {c, a, b});
    }
  }
}

}  // namespace

TEST(Simulator, BitFlipAndCnot) {
  SimState s(1);
  apply_gate_inplace(s, Gate::rx(0, kPi));
  EXPECT_NEAR(std::norm(s.amplitudes()[1]), 1.0, 1e-15);

  SimState t(Statevector::basis(2, 0b10));
  t = apply_gate(t, Gate::cnot(0, 1));
  EXPECT_NEAR(std::norm(t.amplitudes()[0b11]), 1.0, 1e-15);
}

TEST(Simulator, RandomCircuitMatchesDenseBuildUp) {
  std::mt19937_64 rng(31);
  const std::size_t n = 4;
  Circuit c(n);
  for (int i = 0; i < 40; ++i) c.add(random_gate(n, rng));
  ComplexTensor full = ComplexTensor::identity(16);
  for (const auto& g : c.gates()) full = oracle::dense_matmul(oracle::embed(g.local_matrix(), n, g.qubits), full);
  const auto v = oracle::random_state(n, rng);
  const auto expect = oracle::apply_dense(full, v.amplitudes());
  const auto got = run(c, SimState(v)).amplitudes();
  for (std::size_t i = 0; i < 16; ++i) EXPECT_LT(std::abs(got[i] - expect[i]), 1e-12);
  const auto u = circuit_unitary(c);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LT(std::abs(u[i] - full[i]), 1e-12);
}

TEST(Simulator, NormPreservedOverLongCircuits) {
  std::mt19937_64 rng(32);
  SimState s(oracle::random_state(6, rng));
  for (int i = 0; i < 1000; ++i) {
    apply_gate_inplace(s, random_gate(6, rng));
    if (i % 100 == 0) EXPECT_NEAR(s.state().norm(), 1.0, 1e-12);
  }
  EXPECT_NEAR(s.state().norm(), 1.0, 1e-9);
}

TEST(Simulator, AdjointUndoesGate) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 50; ++i) {
    const auto v = oracle::random_state(5, rng);
    const Gate g = random_gate(5, rng);
    const SimState back = apply_gate(apply_gate(SimState(v), g), g.adjoint());
    for (std::size_t j = 0; j < v.dimension(); ++j) EXPECT_LT(std::abs(back.amplitudes()[j] - v[j]), 1e-12);
  }
}

TEST(Simulator, IndexOutOfRange) {
  SimState s(2);
  Gate g = Gate::rx(0, 0.1);
  g.qubits = {2};
  try {
    apply_gate_inplace(s, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(Simulator, EmptyCircuitReturnsInitial) {
  std::mt19937_64 rng(34);
  const auto v = oracle::random_state(3, rng);
  EXPECT_EQ(run(Circuit(3), SimState(v)).amplitudes(), v.amplitudes());
  EXPECT_THROW(SimState(21), Error);
}

TEST(Observable, ZExpectations) {
  EXPECT_NEAR(expectation(SimState(1), Observable::z_string({0})), 1.0, 1e-15);
  const double s = 1.0 / std::sqrt(2.0);
  const SimState plus(Statevector({s, s}));
  EXPECT_NEAR(expectation(plus, Observable::z_string({0})), 0.0, 1e-15);
  EXPECT_NEAR(expectation(plus, Observable::projector(0, 1)), 0.5, 1e-15);
}

TEST(Observable, ZStringMatchesDenseSandwich) {
  std::mt19937_64 rng(35);
  const auto v = oracle::random_state(4, rng);
  const std::vector<std::size_t> qs = {0, 2, 3};
  ComplexTensor full = ComplexTensor::identity(1);
  for (std::size_t q = 0; q < 4; ++q) {
    const bool z = std::find(qs.begin(), qs.end(), q) != qs.end();
    full = oracle::dense_kron(full, z ? ComplexTensor::from_rows({{1, 0}, {0, -1}}) : ComplexTensor::identity(2));
  }
  const auto fv = oracle::apply_dense(full, v.amplitudes());
  Complex expect = 0.0;
  for (std::size_t i = 0; i < 16; ++i) expect += std::conj(v[i]) * fv[i];
  EXPECT_NEAR(expectation(SimState(v), Observable::z_string(qs, 0.5)), 0.5 * expect.real(), 1e-12);
  EXPECT_NEAR(expectation(SimState(v), Observable::dense(full)), expect.real(), 1e-12);
}

TEST(Observable, DenseMustBeHermitian) {
  ComplexTensor m = ComplexTensor::zeros(2, 2);
  m(0, 1) = 1.0;
  try {
    Observable::dense(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}
