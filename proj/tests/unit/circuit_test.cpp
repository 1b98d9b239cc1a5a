#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "ampforge/circuit.hpp"
#include "ampforge/error.hpp"
#include "ampforge/simulator.hpp"
#include "oracles.hpp"

using namespace ampforge;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexTensor pauli(char p) {
  switch (p) {
    case 'X': return ComplexTensor::from_rows({{0, 1}, {1, 0}});
    case 'Y': return ComplexTensor::from_rows({{0, Complex(0, -1)}, {Complex(0, 1), 0}});
    case 'Z': return ComplexTensor::from_rows({{1, 0}, {0, -1}});
  }
  return ComplexTensor::identity(2);
}

// exp(i (c1 XX + c2 YY + c3 ZZ)) as a product of commuting factors
// cos(c) I + i sin(c) PP.
ComplexTensor interaction(double c1, double c2, double c3) {
  ComplexTensor u = ComplexTensor::identity(4);
  const double cs[] = {c1, c2, c3};
  const char ps[] = {'X', 'Y', 'Z'};
  for (int k = 0; k < 3; ++k) {
    ComplexTensor f = std::cos(cs[k]) * ComplexTensor::identity(4);
    f += Complex(0, std::sin(cs[k])) * oracle::dense_kron(pauli(ps[k]), pauli(ps[k]));
    u = oracle::dense_matmul(u, f);
  }
  return u;
}

Complex det4(ComplexTensor a) {
  Complex det = 1.0;
  for (std::size_t c = 0; c < 4; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < 4; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (std::abs(a(piv, c)) == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < 4; ++j) std::swap(a(c, j), a(piv, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < 4; ++r) {
      const Complex f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < 4; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

// Local invariants (G1, G2) of a two-qubit gate, computed in the Bell basis.
std::pair<Complex, Complex> makhlin_invariants(const ComplexTensor& u) {
  const double s = 1.0 / std::sqrt(2.0);
  const ComplexTensor q = ComplexTensor::from_rows({{s, Complex(0, s), 0, 0},
                                                    {0, 0, Complex(0, s), s},
                                                    {0, 0, Complex(0, s), -s},
                                                    {s, Complex(0, -s), 0, 0}});
  const ComplexTensor ub = oracle::dense_matmul(oracle::dense_matmul(q.adjoint(), u), q);
  const ComplexTensor m = oracle::dense_matmul(ub.transpose(), ub);
  const Complex d = det4(u);
  const Complex tr = m.trace();
  const Complex tr2 = oracle::dense_matmul(m, m).trace();
  return {tr * tr / (16.0 * d), (tr * tr - tr2) / (4.0 * d)};
}

ComplexTensor product_of(const std::vector<Gate>& gates, std::size_t n) {
  ComplexTensor u = ComplexTensor::identity(std::size_t{1} << n);
  for (const auto& g : gates) u = oracle::dense_matmul(oracle::embed(g.local_matrix(), n, g.qubits), u);
  return u;
}

std::size_t cnots_in(const std::vector<Gate>& gates) {
  std::size_t c = 0;
  for (const auto& g : gates) c += g.kind == GateKind::CNOT;
  return c;
}

}  // namespace

TEST(Gates, RotationMatricesHaveClosedForm) {
  const double t = 0.37;
  const auto rz = rz_matrix(t);
  EXPECT_LT(std::abs(rz(0, 0) - std::polar(1.0, -t / 2)), 1e-15);
  EXPECT_LT(std::abs(rz(1, 1) - std::polar(1.0, t / 2)), 1e-15);
  const auto rx = rx_matrix(kPi);
  EXPECT_LT(operator_distance_up_to_phase(rx, pauli('X')), 1e-14);
  const auto ry = ry_matrix(kPi);
  EXPECT_LT(operator_distance_up_to_phase(ry, pauli('Y')), 1e-14);
}

TEST(Circuit, AddValidatesGates) {
  Circuit c(3);
  EXPECT_NO_THROW(c.add(Gate::cnot(0, 2)));
  EXPECT_THROW(c.add(Gate::cnot(1, 1)), Error);
  EXPECT_THROW(c.add(Gate::rx(3, 0.1)), Error);
  EXPECT_THROW(c.add(Gate::ry(0, std::nan(""))), Error);
  EXPECT_THROW(Gate::unitary(ComplexTensor::zeros(4, 4), {0, 1}), Error);
  EXPECT_EQ(c.size(), 1u);
}

TEST(Circuit, AdjointReversesAndInverts) {
  std::mt19937_64 rng(21);
  Circuit c(2);
  c.add(Gate::rx(0, 0.3)).add(Gate::cnot(0, 1)).add(Gate::unitary(oracle::random_unitary(4, rng), {1, 0}));
  const ComplexTensor u = circuit_unitary(c);
  const ComplexTensor ud = circuit_unitary(c.adjoint());
  EXPECT_LT(operator_distance_up_to_phase(oracle::dense_matmul(ud, u), ComplexTensor::identity(4)), 1e-12);
}

TEST(Kak, IdentityNeedsNoCnot) {
  const auto gates = decompose_two_qubit(ComplexTensor::identity(4));
  EXPECT_EQ(cnots_in(gates), 0u);
  EXPECT_EQ(minimal_cnot_count(ComplexTensor::identity(4)), 0);
}

TEST(Kak, CnotCoordinatesAndSingleCnot) {
  const auto c = canonical_coordinates(cnot_matrix());
  EXPECT_NEAR(c.c1, kPi / 4, 1e-12);
  EXPECT_NEAR(c.c2, 0.0, 1e-12);
  EXPECT_NEAR(c.c3, 0.0, 1e-12);
  const auto gates = decompose_two_qubit(cnot_matrix());
  EXPECT_EQ(cnots_in(gates), 1u);
  EXPECT_LT(operator_distance_up_to_phase(product_of(gates, 2), cnot_matrix()), 1e-8);
}

TEST(Kak, CoordinatesReproduceLocalInvariants) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = oracle::random_unitary(4, rng);
    const auto c = canonical_coordinates(u);
    EXPECT_LE(c.c1, kPi / 4 + 1e-12);
    EXPECT_GE(c.c1, c.c2 - 1e-12);
    EXPECT_GE(c.c2, std::abs(c.c3) - 1e-12);
    const auto [g1, g2] = makhlin_invariants(u);
    const auto [h1, h2] = makhlin_invariants(interaction(c.c1, c.c2, c.c3));
    EXPECT_LT(std::abs(g1 - h1), 1e-9);
    EXPECT_LT(std::abs(g2 - h2), 1e-9);
  }
}

TEST(Kak, SpecialClassesUseFewerCnots) {
  std::mt19937_64 rng(23);
  const auto a = oracle::dense_kron(oracle::random_unitary(2, rng), oracle::random_unitary(2, rng));
  const auto b = oracle::dense_kron(oracle::random_unitary(2, rng), oracle::random_unitary(2, rng));
  const auto sandwich = [&](const ComplexTensor& core) { return oracle::dense_matmul(oracle::dense_matmul(a, core), b); };

  EXPECT_EQ(minimal_cnot_count(a), 0);
  EXPECT_EQ(minimal_cnot_count(sandwich(cnot_matrix())), 1);
  EXPECT_EQ(minimal_cnot_count(sandwich(interaction(0.3, 0.1, 0.0))), 2);
  EXPECT_EQ(minimal_cnot_count(sandwich(interaction(kPi / 4, kPi / 4, kPi / 4))), 3);  // SWAP class
  for (const auto& u : {a, sandwich(cnot_matrix()), sandwich(interaction(0.3, 0.1, 0.0)),
                        sandwich(interaction(0.5, 0.2, -0.1))}) {
    const auto gates = decompose_two_qubit(u);
    EXPECT_EQ(static_cast<int>(cnots_in(gates)), minimal_cnot_count(u));
    EXPECT_LT(operator_distance_up_to_phase(product_of(gates, 2), u), 1e-8);
  }
}

TEST(Kak, RandomUnitariesReconstruct) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = oracle::random_unitary(4, rng);
    const auto gates = decompose_two_qubit(u);
    EXPECT_EQ(cnots_in(gates), 3u);
    EXPECT_LT(operator_distance_up_to_phase(product_of(gates, 2), u), 1e-8);
  }
}

TEST(Kak, QubitOrderIsRespected) {
  std::mt19937_64 rng(25);
  const auto u = oracle::random_unitary(4, rng);
  const auto gates = decompose_two_qubit(u, 2, 0);
  EXPECT_LT(operator_distance_up_to_phase(product_of(gates, 3), oracle::embed(u, 3, {2, 0})), 1e-8);
}

TEST(Kak, RejectsNonUnitary) {
  ComplexTensor bad = ComplexTensor::identity(4);
  bad(3, 3) = 0.5;
  try {
    decompose_two_qubit(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotUnitary);
  }
}

TEST(Kak, SingleQubitEuler) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = oracle::random_unitary(2, rng);
    const auto gates = decompose_single_qubit(u, 0);
    EXPECT_LE(gates.size(), 3u);
    EXPECT_LT(operator_distance_up_to_phase(product_of(gates, 1), u), 1e-10);
  }
}

TEST(CnotCount, CountsBlocksByDecomposition) {
  std::mt19937_64 rng(27);
  EXPECT_EQ(cnot_count(Circuit(3)), 0u);
  Circuit c(3);
  c.add(Gate::unitary(oracle::random_unitary(4, rng), {0, 1}));
  EXPECT_EQ(cnot_count(c), 3u);
  c.add(Gate::cnot(1, 2));
  c.add(Gate::unitary(cnot_matrix(), {1, 2}));
  EXPECT_EQ(cnot_count(c), 5u);
  c.add(Gate::unitary(oracle::random_unitary(8, rng), {0, 1, 2}));
  EXPECT_EQ(cnot_count(c), 5u + 20u);
}

TEST(CnotCount, ShannonBound) {
  EXPECT_EQ(shannon_cnot_bound(2), 3u);
  EXPECT_EQ(shannon_cnot_bound(3), 20u);
  EXPECT_EQ(shannon_cnot_bound(4), 100u);
}

TEST(Decompose, ExpandsBlocksAndRejectsLargeOnes) {
  std::mt19937_64 rng(28);
  Circuit c(3);
  c.add(Gate::unitary(oracle::random_unitary(4, rng), {2, 1}));
  c.add(Gate::unitary(oracle::random_unitary(2, rng), {0}));
  const Circuit d = decompose(c);
  for (const auto& g : d.gates()) EXPECT_NE(g.kind, GateKind::Unitary);
  EXPECT_LT(operator_distance_up_to_phase(circuit_unitary(d), circuit_unitary(c)), 1e-8);
  c.add(Gate::unitary(oracle::random_unitary(8, rng), {0, 1, 2}));
  try {
    decompose(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndecomposedBlock);
  }
}

TEST(Baseline, ZeroStateAndSingleQubit) {
  EXPECT_EQ(cnot_count(exact_prep_baseline(Statevector::zero(4))), 0u);
  EXPECT_TRUE(exact_prep_baseline(Statevector::zero(4)).empty());
  const Statevector one({Complex(0.6, 0.0), Complex(0.0, 0.8)});
  const Circuit c = exact_prep_baseline(one);
  EXPECT_EQ(cnot_count(c), 0u);
  EXPECT_LE(c.size(), 2u);
  EXPECT_GE(fidelity(run(c).state(), one), 1.0 - 1e-12);
}

TEST(Baseline, PreparesRandomStatesExactly) {
  std::mt19937_64 rng(29);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto v = oracle::random_state(n, rng);
    const Circuit c = exact_prep_baseline(v);
    EXPECT_GE(fidelity(run(c).state(), v), 1.0 - 1e-8) << n;
    EXPECT_EQ(cnot_count(c), exact_prep_cnot_formula(n));
  }
  std::vector<Complex> real(32);
  std::normal_distribution<double> g;
  for (auto& x : real) x = g(rng);
  const Statevector rv = Statevector(real).normalized();
  const Circuit rc = exact_prep_baseline(rv);
  EXPECT_GE(fidelity(run(rc).state(), rv), 1.0 - 1e-8);
  EXPECT_LE(cnot_count(rc), exact_prep_cnot_formula(5, false));
}

TEST(Baseline, CountGrowsGeometrically) {
  std::mt19937_64 rng(30);
  std::size_t prev = 0;
  for (std::size_t n = 3; n <= 6; ++n) {
    const std::size_t count = cnot_count(exact_prep_baseline(oracle::random_state(n, rng)));
    if (prev) EXPECT_GE(static_cast<double>(count), 1.8 * static_cast<double>(prev));
    prev = count;
  }
  try {
    exact_prep_baseline(Statevector::zero(9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}

TEST(Qasm, EmptyCircuitIsHeaderOnly) {
  EXPECT_EQ(export_qasm(Circuit(3)), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n");
}

TEST(Qasm, CnotLineFormat) {
  Circuit c(2);
  c.add(Gate::cnot(0, 1));
  EXPECT_EQ(export_qasm(c), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncx q[0],q[1];\n");
}

TEST(Qasm, AnglesUseSeventeenDigitsAndRoundTrip) {
  Circuit c(2);
  c.add(Gate::rz(1, 0.1)).add(Gate::ry(0, -kPi / 3)).add(Gate::rx(1, 1e-300)).add(Gate::cnot(1, 0));
  const std::string text = export_qasm(c);
  EXPECT_NE(text.find("rz(0.10000000000000001) q[1];"), std::string::npos);
  const Circuit back = parse_qasm(text);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.gates()[i].kind, c.gates()[i].kind);
    EXPECT_EQ(back.gates()[i].qubits, c.gates()[i].qubits);
    EXPECT_EQ(back.gates()[i].angle, c.gates()[i].angle);
  }
  EXPECT_EQ(export_qasm(back), text);
}

TEST(Qasm, GhzRoundTripThroughParser) {
  Circuit c(4);
  c.add(Gate::ry(0, kPi / 2));
  for (std::size_t q = 0; q + 1 < 4; ++q) c.add(Gate::cnot(q, q + 1));
  const Circuit back = parse_qasm(export_qasm(c));
  EXPECT_GE(fidelity(run(back).state(), Statevector::ghz(4)), 1.0 - 1e-12);
}

TEST(Qasm, RawBlocksAreRejected) {
  Circuit c(2);
  c.add(Gate::unitary(ComplexTensor::identity(4), {0, 1}));
  try {
    export_qasm(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndecomposedBlock);
  }
}

TEST(Qasm, ParseErrorsNameTheLine) {
  try {
    parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\nh q[0];\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
  EXPECT_THROW(parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[5];\n"), Error);
}

TEST(Qasm, GateCountSummary) {
  Circuit c(2);
  c.add(Gate::rx(0, 1.0)).add(Gate::cnot(0, 1));
  const auto j = gate_count_json(c);
  EXPECT_EQ(j.at("cnot_count"), 1);
  EXPECT_EQ(j.at("rotations"), 1);
}
