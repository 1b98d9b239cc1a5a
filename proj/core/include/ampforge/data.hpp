#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ampforge/mps.hpp"

namespace ampforge {

/// Row-major grayscale image with a class label.
struct ImageSample {
  std::vector<double> pixels;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t label = 0;
};

enum class Encoding { Plain, Compressed };

const char* to_string(Encoding e) noexcept;

struct EncodedSample {
  Statevector state;
  std::size_t label = 0;
  Encoding encoding = Encoding::Plain;
  double source_fidelity = 1.0;
};

/// Zero-pads to a power of two and L2-normalises; one pixel per amplitude.
EncodedSample encode_plain(const ImageSample& img);

/// Packs horizontal neighbours (v_2i, v_2i+1) into one amplitude
/// v_2i + i v_2i+1, halving the dimension.
EncodedSample encode_compressed(const ImageSample& img);

/// Inverse of encode_compressed up to normalisation: pixel 2i is Re a_i and
/// pixel 2i+1 is Im a_i, cropped to width x height.
ImageSample decode_compressed(const Statevector& state, std::size_t width, std::size_t height);

/// Places img centred on a zero canvas of the given size.
ImageSample pad_image(const ImageSample& img, std::size_t width, std::size_t height);

/// Pads both sides up to the next power of two (centred); unchanged if already
/// power-of-two sized.
ImageSample pad_to_power_of_two(const ImageSample& img);

/// 8x8 binary images: label 0 is a horizontal bar, label 1 a vertical bar,
/// both of length 6 with seeded position jitter. Classes alternate.
std::vector<ImageSample> generate_shapes(std::size_t n_per_class, std::uint64_t seed);

/// Seeded complex Gaussian perturbation mixed in so that |<state|out>|^2
/// equals target_fidelity.
Statevector random_perturb(const Statevector& state, double target_fidelity, std::uint64_t seed);

/// Label-first rows of width*height pixel values. A first line starting with
/// "label" is treated as a header.
std::vector<ImageSample> load_csv(const std::filesystem::path& path, std::size_t width, std::size_t height);
void write_csv(const std::filesystem::path& path, const std::vector<ImageSample>& samples);

struct DatasetManifest {
  std::string name;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::string> classes;
  std::vector<std::string> files;
};

nlohmann::json manifest_json(const DatasetManifest& m);
DatasetManifest parse_manifest(const nlohmann::json& j);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Binary PGM, values scaled so the brightest pixel is 255 (negatives clip).
void write_pgm(const std::filesystem::path& path, const ImageSample& img);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

}  // namespace ampforge
