#pragma once

#include <cstddef>
#include <vector>

#include "ampforge/circuit.hpp"
#include "ampforge/mps.hpp"
#include "ampforge/tensor.hpp"

namespace ampforge {

inline constexpr std::size_t kSimulatorMaxQubits = 20;

/// Dense statevector under simulation. Qubit 0 is the most significant bit.
class SimState {
 public:
  SimState() = default;
  explicit SimState(std::size_t n_qubits);
  explicit SimState(Statevector v);

  std::size_t n_qubits() const noexcept { return state_.n_qubits(); }
  const Statevector& state() const noexcept { return state_; }
  const std::vector<Complex>& amplitudes() const noexcept { return state_.amplitudes(); }
  std::vector<Complex>& amplitudes() noexcept { return state_.amplitudes(); }

 private:
  Statevector state_;
};

/// Applies `g` in place.
void apply_gate_inplace(SimState& s, const Gate& g);
SimState apply_gate(SimState s, const Gate& g);

/// Runs `c` from `initial`, or from |0...0> when omitted.
SimState run(const Circuit& c);
SimState run(const Circuit& c, SimState initial);

/// Diagonal or dense Hermitian readout.
class Observable {
 public:
  /// coefficient * prod_{q in qubits} Z_q.
  static Observable z_string(std::vector<std::size_t> qubits, double coefficient = 1.0);
  /// |bit><bit| on one qubit.
  static Observable projector(std::size_t qubit, int bit);
  /// Dense Hermitian matrix over all qubits; NotHermitian otherwise.
  static Observable dense(ComplexTensor matrix);

  enum class Kind { ZString, Projector, Dense };
  Kind kind() const noexcept { return kind_; }

  double expectation(const SimState& s) const;

 private:
  Kind kind_ = Kind::ZString;
  std::vector<std::size_t> qubits_;
  double coefficient_ = 1.0;
  int bit_ = 0;
  ComplexTensor matrix_;
};

double expectation(const SimState& s, const Observable& obs);

/// Dense 2^N x 2^N unitary of the whole circuit (N <= 10).
ComplexTensor circuit_unitary(const Circuit& c);

}  // namespace ampforge
