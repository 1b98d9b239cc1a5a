#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ampforge/tensor.hpp"

namespace ampforge {

/// Dense amplitude vector over n qubits. Qubit 0 is the most significant bit
/// of the basis-state index.
class Statevector {
 public:
  Statevector() = default;
  /// Length must be a power of two (>= 2). Amplitudes are stored as given.
  explicit Statevector(std::vector<Complex> amplitudes);

  static Statevector zero(std::size_t n_qubits);
  static Statevector basis(std::size_t n_qubits, std::uint64_t index);
  static Statevector ghz(std::size_t n_qubits);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
  std::vector<Complex>& amplitudes() noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }

  double norm() const;
  /// Copy scaled to unit norm; AllZeroInput if the norm vanishes.
  Statevector normalized() const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

Complex inner_product(const Statevector& a, const Statevector& b);
/// |<a|b>|^2 for unit-norm inputs.
double fidelity(const Statevector& a, const Statevector& b);

struct TruncationConfig {
  std::optional<std::size_t> max_bond;
  /// Relative cut: singular values with s_i <= tol * s_max are dropped.
  double tol = 1e-12;
};

/// Open-boundary matrix product state. Site s is a rank-3 tensor shaped
/// (left bond, 2, right bond); the outermost bonds are 1.
class Mps {
 public:
  Mps() = default;
  Mps(std::vector<ComplexTensor> sites, std::optional<std::size_t> ortho_centre = std::nullopt,
      double discarded_weight = 0.0);

  /// Product state from one single-qubit amplitude pair per site.
  static Mps product(const std::vector<std::array<Complex, 2>>& qubits);

  std::size_t n_qubits() const noexcept { return sites_.size(); }
  const std::vector<ComplexTensor>& sites() const noexcept { return sites_; }
  const ComplexTensor& site(std::size_t i) const { return sites_.at(i); }
  std::optional<std::size_t> ortho_centre() const noexcept { return centre_; }
  /// Internal bond dimensions s_0 .. s_{N-2}.
  std::vector<std::size_t> bond_dims() const;
  std::size_t max_bond() const;
  /// Cumulative weight removed by truncating operations, each measured
  /// relative to the norm of the state it was removed from.
  double discarded_weight() const noexcept { return discarded_weight_; }

  /// <basis|psi> for a computational-basis index (qubit 0 = MSB).
  Complex amplitude(std::uint64_t basis_index) const;
  double norm() const;

 private:
  std::vector<ComplexTensor> sites_;
  std::optional<std::size_t> centre_;
  double discarded_weight_ = 0.0;
};

Mps from_statevector(const Statevector& v, const TruncationConfig& cfg = {});

inline constexpr std::size_t kDefaultStatevectorCap = 20;
Statevector to_statevector(const Mps& m, std::size_t max_qubits = kDefaultStatevectorCap);

/// Gauge transform so that every site left of `centre` is left-orthogonal and
/// every site right of it is right-orthogonal. The physical state is unchanged.
Mps canonicalize(const Mps& m, std::size_t centre);

/// Reduced density matrix (2^k x 2^k) over sites [first, first + k).
ComplexTensor reduced_density_matrix(const Mps& m, std::size_t first, std::size_t k);

/// Applies a 2^k x 2^k unitary to sites [first, first + k) and splits the
/// window back into sites with SVD, truncating per `cfg` and renormalising.
/// The orthogonality centre ends on the last site of the window.
Mps apply_window_unitary(const Mps& m, const ComplexTensor& u, std::size_t first,
                         const TruncationConfig& cfg = {});

Complex overlap(const Mps& a, const Mps& b);

/// Max deviation from the canonical-form conditions implied by ortho_centre().
double canonical_form_error(const Mps& m);

/// Bond dimensions and per-site norms, for the encoder's --dump-mps output.
nlohmann::json mps_debug_json(const Mps& m);

}  // namespace ampforge
