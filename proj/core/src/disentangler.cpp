#include "ampforge/disentangler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

namespace ampforge {

namespace {

constexpr double kConvergenceSlack = 1e-10;
constexpr double kTieTolerance = 1e-10;
constexpr double kNegligibleEigenvalue = 1e-12;

double zero_fidelity(const Mps& m) {
  const double n = m.norm();
  if (n <= 0.0) return 0.0;
  return std::clamp(std::norm(m.amplitude(0)) / (n * n), 0.0, 1.0);
}

void validate(const DisentangleConfig& cfg, std::size_t n) {
  if (cfg.k < 2) fail(ErrorCode::InvalidArgument, "window size k must be at least 2");
  if (cfg.k > n) {
    fail(ErrorCode::InvalidArgument,
         "window size " + std::to_string(cfg.k) + " exceeds " + std::to_string(n) + " qubits");
  }
  if (!(cfg.target_fidelity > 0.0 && cfg.target_fidelity <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "target fidelity must lie in (0, 1]");
  }
  if (cfg.max_sweeps == 0) fail(ErrorCode::InvalidArgument, "max_sweeps must be positive");
}

}  // namespace

const char* to_string(Layout layout) noexcept {
  return layout == Layout::Staircase ? "staircase" : "disjoint";
}

Layout parse_layout(std::string_view text) {
  if (text == "staircase") return Layout::Staircase;
  if (text == "disjoint") return Layout::Disjoint;
  fail(ErrorCode::InvalidArgument, "unknown layout '" + std::string(text) + "'");
}

std::size_t DisentangleReport::unitary_count() const {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.size();
  return total;
}

DidNotConverge::DidNotConverge(DisentangleReport report)
    : Error(ErrorCode::DidNotConverge,
            "fidelity " + std::to_string(report.achieved_fidelity) + " after " +
                std::to_string(report.layers.size()) + " sweeps"),
      report_(std::move(report)) {}

WindowUnitary disentangling_unitary(const ComplexTensor& rho, WindowEnd end) {
  if (rho.rank() != 2 || rho.rows() != rho.cols() || rho.rows() < 4 || !std::has_single_bit(rho.rows())) {
    fail(ErrorCode::NotDensityMatrix, "density matrix must be 2^k x 2^k with k >= 2");
  }
  const std::size_t dim = rho.rows();
  if ((rho - rho.adjoint()).frobenius_norm() > 1e-8) fail(ErrorCode::NotDensityMatrix, "density matrix is not Hermitian");
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0)) > 1e-8) fail(ErrorCode::NotDensityMatrix, "density matrix trace is not 1");

  const EigResult eig = eig_hermitian(rho);
  if (eig.values.back() < -1e-8) fail(ErrorCode::NotDensityMatrix, "density matrix is not positive semidefinite");

  const std::size_t half = dim / 2;
  WindowUnitary w;
  w.k = static_cast<std::size_t>(std::countr_zero(dim));
  w.disentangled_site = end;
  w.degenerate = eig.values[half - 1] > kNegligibleEigenvalue &&
                 eig.values[half - 1] - eig.values[half] <= kTieTolerance;
  w.matrix = ComplexTensor::zeros(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t pivot = 0;
    for (std::size_t r = 1; r < dim; ++r) {
      if (std::abs(eig.vectors(r, i)) > std::abs(eig.vectors(pivot, i)) + 1e-14) pivot = r;
    }
    const Complex phase = std::abs(eig.vectors(pivot, i)) > 0 ? std::conj(eig.vectors(pivot, i)) /
                                                                     std::abs(eig.vectors(pivot, i))
                                                               : Complex(1.0);
    std::size_t row = i;
    if (end == WindowEnd::Last) row = i < half ? 2 * i : 2 * (i - half) + 1;
    for (std::size_t c = 0; c < dim; ++c) w.matrix(row, c) = std::conj(phase * eig.vectors(c, i));
  }
  return w;
}

std::vector<std::pair<std::size_t, WindowEnd>> sweep_windows(std::size_t n, std::size_t k, Layout layout) {
  std::vector<std::pair<std::size_t, WindowEnd>> out;
  if (k > n) return out;
  if (layout == Layout::Staircase) {
    for (std::size_t a = 0; a + k <= n; ++a) out.emplace_back(a, WindowEnd::First);
    return out;
  }
  auto end_for = [&](std::size_t a) {
    // Point the disentangled end away from the middle of the chain.
    return 2 * a + k - 1 < n ? WindowEnd::First : WindowEnd::Last;
  };
  for (std::size_t a = 0; a + k <= n; a += k) out.emplace_back(a, end_for(a));
  for (std::size_t a = std::max<std::size_t>(1, k / 2); a + k <= n; a += k) out.emplace_back(a, end_for(a));
  return out;
}

SweepResult sweep(const Mps& m, const DisentangleConfig& cfg, std::size_t sweep_index) {
  validate(cfg, m.n_qubits());
  SweepResult result{m, {}};
  for (const auto& [first, end] : sweep_windows(m.n_qubits(), cfg.k, cfg.layout)) {
    const ComplexTensor rho = reduced_density_matrix(result.state, first, cfg.k);
    WindowUnitary w = disentangling_unitary(rho, end);
    w.window = first;
    w.sweep = sweep_index;
    result.state = apply_window_unitary(result.state, w.matrix, first, cfg.truncation);
    result.layer.push_back(std::move(w));
  }
  return result;
}

DisentangleReport disentangle_partial(const Mps& m, const DisentangleConfig& cfg) {
  validate(cfg, m.n_qubits());
  if (std::abs(m.norm() - 1.0) > 1e-8) fail(ErrorCode::InvalidArgument, "input state is not normalised");

  DisentangleReport report;
  report.n_qubits = m.n_qubits();
  report.k = cfg.k;
  report.layout = cfg.layout;
  report.initial_fidelity = zero_fidelity(m);
  report.achieved_fidelity = report.initial_fidelity;
  report.final_state = m;

  const double threshold = cfg.target_fidelity - kConvergenceSlack;
  report.converged = report.achieved_fidelity >= threshold;
  while (!report.converged && report.layers.size() < cfg.max_sweeps) {
    SweepResult s = sweep(report.final_state, cfg, report.layers.size());
    for (const auto& w : s.layer) report.degenerate_spectrum_flags.push_back(w.degenerate);
    report.final_state = std::move(s.state);
    report.layers.push_back(std::move(s.layer));
    report.achieved_fidelity = zero_fidelity(report.final_state);
    report.fidelity_trace.push_back(report.achieved_fidelity);
    report.converged = report.achieved_fidelity >= threshold;
  }
  return report;
}

DisentangleReport disentangle_partial(const Statevector& v, const DisentangleConfig& cfg) {
  if (std::abs(v.norm() - 1.0) > 1e-8) fail(ErrorCode::InvalidArgument, "input state is not normalised");
  return disentangle_partial(from_statevector(v, cfg.truncation), cfg);
}

DisentangleReport disentangle(const Mps& m, const DisentangleConfig& cfg) {
  DisentangleReport r = disentangle_partial(m, cfg);
  if (!r.converged) throw DidNotConverge(std::move(r));
  return r;
}

DisentangleReport disentangle(const Statevector& v, const DisentangleConfig& cfg) {
  DisentangleReport r = disentangle_partial(v, cfg);
  if (!r.converged) throw DidNotConverge(std::move(r));
  return r;
}

Circuit preparation_program(const DisentangleReport& report) {
  Circuit c(report.n_qubits);
  for (auto layer = report.layers.rbegin(); layer != report.layers.rend(); ++layer) {
    for (auto w = layer->rbegin(); w != layer->rend(); ++w) {
      std::vector<std::size_t> qubits(w->k);
      for (std::size_t j = 0; j < w->k; ++j) qubits[j] = w->window + j;
      c.add(Gate::unitary(w->matrix.adjoint(), std::move(qubits)));
    }
  }
  c.metadata.source_fidelity = report.achieved_fidelity;
  c.metadata.sweeps = report.layers.size();
  return c;
}

std::size_t window_size_for_bond(std::size_t chi) {
  if (chi <= 1) return 2;
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::bit_width(chi - 1)) + 1);
}

nlohmann::json report_json(const DisentangleReport& report) {
  nlohmann::json per_layer = nlohmann::json::array();
  for (const auto& l : report.layers) per_layer.push_back(l.size());
  std::size_t degenerate = 0;
  for (bool f : report.degenerate_spectrum_flags) degenerate += f ? 1 : 0;
  return {{"n_qubits", report.n_qubits},
          {"k", report.k},
          {"layout", to_string(report.layout)},
          {"sweeps", report.layers.size()},
          {"unitaries_per_layer", per_layer},
          {"initial_fidelity", report.initial_fidelity},
          {"fidelity_trace", report.fidelity_trace},
          {"achieved_fidelity", report.achieved_fidelity},
          {"converged", report.converged},
          {"degenerate_steps", degenerate},
          {"degenerate_spectrum_flags", report.degenerate_spectrum_flags}};
}

}  // namespace ampforge
