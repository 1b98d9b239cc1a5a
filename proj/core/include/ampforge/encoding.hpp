#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ampforge/data.hpp"
#include "ampforge/disentangler.hpp"

namespace ampforge {

/// How classical inputs reach the classifier: exact amplitudes, the state
/// prepared by the disentangler's circuit at a target fidelity, or a random
/// perturbation at a given fidelity.
struct EncodingSpec {
  enum class Kind { Exact, Mps, Perturb };
  Kind kind = Kind::Exact;
  double fidelity = 1.0;
  std::size_t k = 2;
  Layout layout = Layout::Staircase;
  std::size_t max_sweeps = 200;

  /// "exact", "mps:F" or "perturb:F" with F in (0, 1].
  static EncodingSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Prepared state of a disentangling run: the preparation circuit simulated
/// from |0...0>, with the global phase chosen so <target|prepared> >= 0.
Statevector prepared_state(const DisentangleReport& report);

/// Applies `spec` to an already encoded state. `seed` drives perturbation.
EncodedSample apply_encoding(const EncodingSpec& spec, EncodedSample exact, std::uint64_t seed);

/// Compressed encoding of the image (padded to power-of-two sides) followed
/// by apply_encoding.
EncodedSample encode_image(const EncodingSpec& spec, const ImageSample& img, std::uint64_t seed);

}  // namespace ampforge
