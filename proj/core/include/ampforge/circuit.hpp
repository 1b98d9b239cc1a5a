#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ampforge/mps.hpp"
#include "ampforge/tensor.hpp"

namespace ampforge {

enum class GateKind { RX, RY, RZ, CNOT, Unitary };

const char* to_string(GateKind kind) noexcept;

/// One circuit instruction. `Unitary` carries a dense 2^q x 2^q block whose
/// row/column index treats qubits[0] as the most significant bit.
struct Gate {
  GateKind kind = GateKind::Unitary;
  std::vector<std::size_t> qubits;
  double angle = 0.0;
  ComplexTensor matrix;

  static Gate rx(std::size_t q, double theta);
  static Gate ry(std::size_t q, double theta);
  static Gate rz(std::size_t q, double theta);
  static Gate cnot(std::size_t control, std::size_t target);
  static Gate unitary(ComplexTensor u, std::vector<std::size_t> qubits);

  /// Dense matrix of the gate on its own qubits.
  ComplexTensor local_matrix() const;
  Gate adjoint() const;
  bool is_rotation() const noexcept {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
  }
};

struct CircuitMetadata {
  std::optional<double> source_fidelity;
  std::optional<std::size_t> sweeps;
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {}

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }

  /// Validates indices (distinct, < n_qubits) and finiteness of angles.
  Circuit& add(Gate g);
  Circuit& append(const Circuit& other);
  Circuit adjoint() const;

  CircuitMetadata metadata;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Gate> gates_;
};

// Single-qubit matrices (Rz(t) = diag(e^{-it/2}, e^{it/2}) etc.).
ComplexTensor rx_matrix(double theta);
ComplexTensor ry_matrix(double theta);
ComplexTensor rz_matrix(double theta);
ComplexTensor cnot_matrix();

/// Interaction coefficients of a two-qubit unitary in the Weyl chamber:
/// u ~ (A1 x A2) exp(i (c1 XX + c2 YY + c3 ZZ)) (B1 x B2) with
/// pi/4 >= c1 >= c2 >= |c3|.
struct CanonicalCoordinates {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

CanonicalCoordinates canonical_coordinates(const ComplexTensor& u);

/// Minimal CNOT count (0..3) for a two-qubit unitary, using the special-class
/// tolerance 1e-9 on the canonical coordinates.
int minimal_cnot_count(const ComplexTensor& u);

/// Decomposes a 4x4 unitary into RZ/RY/CNOT gates on (q0, q1), with q0 the
/// most significant qubit of u. At most three CNOTs; the product equals u up
/// to global phase.
std::vector<Gate> decompose_two_qubit(const ComplexTensor& u, std::size_t q0 = 0, std::size_t q1 = 1);

/// RZ RY RZ Euler gates for a 2x2 unitary, in application order.
std::vector<Gate> decompose_single_qubit(const ComplexTensor& u, std::size_t q);

/// Replaces every Unitary block (one or two qubits) with elementary gates.
Circuit decompose(const Circuit& c);

/// CNOT gates in the circuit, counting two-qubit blocks by their minimal
/// decomposition and larger blocks by the generic quantum Shannon bound.
std::size_t cnot_count(const Circuit& c);

/// CNOT count of the generic quantum Shannon decomposition of an n-qubit
/// unitary, (23/48) 4^n - (3/2) 2^n + 4/3.
std::size_t shannon_cnot_bound(std::size_t n_qubits);

inline constexpr std::size_t kBaselineMaxQubits = 8;

/// Exact preparation circuit built from uniformly controlled rotations,
/// disentangling the least significant qubit first. Used as the gate-count
/// baseline.
Circuit exact_prep_baseline(const Statevector& v);

/// CNOTs used by the uniformly-controlled-rotation construction for a generic
/// n-qubit state (complex: RZ and RY multiplexors at every level).
std::size_t exact_prep_cnot_formula(std::size_t n_qubits, bool complex_amplitudes = true);

/// OpenQASM 2.0 text for a fully decomposed circuit.
std::string export_qasm(const Circuit& c);

/// Parses the subset of OpenQASM 2.0 emitted by export_qasm.
Circuit parse_qasm(std::string_view text);

nlohmann::json gate_count_json(const Circuit& c);

}  // namespace ampforge
