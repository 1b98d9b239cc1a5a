#include "ampforge/encoding.hpp"

#include <cmath>
#include <cstdlib>

#include "ampforge/error.hpp"
#include "ampforge/simulator.hpp"

namespace ampforge {

EncodingSpec EncodingSpec::parse(std::string_view text) {
  EncodingSpec spec;
  if (text == "exact") return spec;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) fail(ErrorCode::InvalidArgument, "unknown encoding '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon);
  const std::string value(text.substr(colon + 1));
  if (kind == "mps") {
    spec.kind = Kind::Mps;
  } else if (kind == "perturb") {
    spec.kind = Kind::Perturb;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown encoding '" + std::string(text) + "'");
  }
  char* end = nullptr;
  spec.fidelity = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || !(spec.fidelity > 0.0 && spec.fidelity <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "encoding fidelity must be a number in (0, 1]: '" + value + "'");
  }
  return spec;
}

std::string EncodingSpec::to_string() const {
  switch (kind) {
    case Kind::Exact: return "exact";
    case Kind::Mps: return "mps:" + format_double(fidelity);
    case Kind::Perturb: return "perturb:" + format_double(fidelity);
  }
  return "exact";
}

Statevector prepared_state(const DisentangleReport& report) {
  SimState s = run(preparation_program(report));
  // The disentangled state is a|0...0> + ..., so the prepared state overlaps
  // the target with phase conj(a); undo it.
  const Complex a = report.final_state.amplitude(0);
  auto& amps = s.amplitudes();
  if (std::abs(a) > 0) {
    const Complex phase = a / std::abs(a);
    for (auto& x : amps) x *= phase;
  }
  return s.state();
}

EncodedSample apply_encoding(const EncodingSpec& spec, EncodedSample exact, std::uint64_t seed) {
  switch (spec.kind) {
    case EncodingSpec::Kind::Exact:
      return exact;
    case EncodingSpec::Kind::Perturb:
      exact.state = random_perturb(exact.state, spec.fidelity, seed);
      exact.source_fidelity = spec.fidelity;
      return exact;
    case EncodingSpec::Kind::Mps: {
      DisentangleConfig cfg;
      cfg.k = std::min(spec.k, exact.state.n_qubits());
      cfg.layout = spec.layout;
      cfg.target_fidelity = spec.fidelity;
      cfg.max_sweeps = spec.max_sweeps;
      if (exact.state.n_qubits() < 2) return exact;
      const DisentangleReport report = disentangle_partial(exact.state, cfg);
      exact.state = prepared_state(report);
      exact.source_fidelity = report.achieved_fidelity;
      return exact;
    }
  }
  return exact;
}

EncodedSample encode_image(const EncodingSpec& spec, const ImageSample& img, std::uint64_t seed) {
  return apply_encoding(spec, encode_compressed(pad_to_power_of_two(img)), seed);
}

}  // namespace ampforge
