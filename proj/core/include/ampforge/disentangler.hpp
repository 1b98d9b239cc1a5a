#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ampforge/circuit.hpp"
#include "ampforge/error.hpp"
#include "ampforge/mps.hpp"
#include "ampforge/tensor.hpp"

namespace ampforge {

enum class Layout { Staircase, Disjoint };

const char* to_string(Layout layout) noexcept;
/// "staircase" or "disjoint"; InvalidArgument otherwise.
Layout parse_layout(std::string_view text);

struct DisentangleConfig {
  std::size_t k = 2;
  double target_fidelity = 1.0;
  std::size_t max_sweeps = 200;
  Layout layout = Layout::Staircase;
  TruncationConfig truncation;
};

/// Which end of the window is rotated toward |0>.
enum class WindowEnd { First, Last };

struct WindowUnitary {
  ComplexTensor matrix;  // 2^k x 2^k, acts on sites [window, window + k)
  std::size_t window = 0;
  std::size_t k = 0;
  std::size_t sweep = 0;
  WindowEnd disentangled_site = WindowEnd::First;
  /// The two eigenvalues straddling the kept/discarded half are equal, so the
  /// rotation cannot improve the |0> weight of the target site.
  bool degenerate = false;
};

using Layer = std::vector<WindowUnitary>;

struct DisentangleReport {
  std::size_t n_qubits = 0;
  std::size_t k = 0;
  Layout layout = Layout::Staircase;
  std::vector<Layer> layers;
  double initial_fidelity = 0.0;
  /// |<0...0|psi>|^2 after each sweep.
  std::vector<double> fidelity_trace;
  double achieved_fidelity = 0.0;
  /// One entry per window step, in application order.
  std::vector<bool> degenerate_spectrum_flags;
  bool converged = false;
  Mps final_state;

  std::size_t unitary_count() const;
};

/// Thrown when max_sweeps is exhausted; the partial report stays usable.
class DidNotConverge : public Error {
 public:
  explicit DidNotConverge(DisentangleReport report);
  const DisentangleReport& report() const noexcept { return report_; }

 private:
  DisentangleReport report_;
};

/// Eigenbasis rotation U = sum_i |b(i)><phi_i| of a window density matrix,
/// eigenvalues descending. b(i) = i for WindowEnd::First; for WindowEnd::Last
/// the upper half of the spectrum maps to even basis states instead.
WindowUnitary disentangling_unitary(const ComplexTensor& rho, WindowEnd end = WindowEnd::First);

/// Window start positions and target ends visited by one sweep.
std::vector<std::pair<std::size_t, WindowEnd>> sweep_windows(std::size_t n_qubits, std::size_t k, Layout layout);

struct SweepResult {
  Mps state;
  Layer layer;
};

SweepResult sweep(const Mps& m, const DisentangleConfig& cfg, std::size_t sweep_index = 0);

/// Repeats sweeps until |<0...0|psi>|^2 reaches the target. Throws
/// DidNotConverge after cfg.max_sweeps sweeps.
DisentangleReport disentangle(const Mps& m, const DisentangleConfig& cfg);
DisentangleReport disentangle(const Statevector& v, const DisentangleConfig& cfg);

/// Same as disentangle, but returns the partial report instead of throwing.
DisentangleReport disentangle_partial(const Mps& m, const DisentangleConfig& cfg);
DisentangleReport disentangle_partial(const Statevector& v, const DisentangleConfig& cfg);

/// Circuit of U^dagger blocks in reverse order; run from |0...0> it prepares
/// the approximated state.
Circuit preparation_program(const DisentangleReport& report);

/// ceil(log2(chi)) + 1, and at least 2.
std::size_t window_size_for_bond(std::size_t chi);

nlohmann::json report_json(const DisentangleReport& report);

}  // namespace ampforge
