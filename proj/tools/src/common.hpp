#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ampforge/data.hpp"
#include "ampforge/mps.hpp"

namespace ampforge::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitNoConvergence = 3;

/// Options shared by every subcommand.
struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  fs::path out = "out";
  bool stamp = false;
};

/// --seed, else AMP_FORGE_SEED, else 0.
std::uint64_t resolve_seed(const CommonOptions& o);

/// git blob id (sha1 of "blob <size>\0" + content) of a file.
std::string git_blob_hash(const fs::path& path);

/// Provenance record written next to every command's outputs.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  bool stamp = false;
  std::string started_at;

  nlohmann::json to_json() const;
};

void write_manifest(const RunManifest& m, const fs::path& dir);
void write_text(const fs::path& path, const std::string& text);

/// A labelled dataset read from CSV, with its image geometry.
struct Dataset {
  std::vector<ImageSample> samples;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<fs::path> files;
};

/// Loads `csv` with the given geometry, or every file in a manifest. Pixels
/// above 1 are treated as 8-bit and scaled into [0, 1].
Dataset load_images(const fs::path& input, std::size_t width, std::size_t height);
/// Loads one file of a manifest by index (0 = train, 1 = test by convention).
Dataset load_manifest_split(const fs::path& manifest, std::size_t index);
/// Keeps samples whose label is listed and relabels them 0..n-1 in list order.
void select_classes(Dataset& d, const std::vector<std::size_t>& classes);
void truncate(Dataset& d, std::size_t limit);

/// Labelled states from a JSON file: [{"label": l, "amplitudes": [[re, im], ...]}, ...].
struct LabelledState {
  Statevector state;
  std::size_t label = 0;
};
std::vector<LabelledState> load_states(const fs::path& path);

std::vector<double> parse_double_list(const std::string& text);
std::string iso_timestamp();

}  // namespace ampforge::cli
