#include "common.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "ampforge/error.hpp"

namespace ampforge::cli {

std::uint64_t resolve_seed(const CommonOptions& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("AMP_FORGE_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') fail(ErrorCode::ParseError, std::string("AMP_FORGE_SEED is not an integer: ") + env);
    return v;
  }
  return 0;
}

std::string git_blob_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), {});
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) && EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  if (!ok) fail(ErrorCode::IoError, "sha1 failed for " + path.string());
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json inputs_json = nlohmann::json::array();
  for (const auto& p : inputs) inputs_json.push_back({{"path", p.generic_string()}, {"git_blob", git_blob_hash(p)}});
  nlohmann::json outputs_json = nlohmann::json::array();
  for (const auto& p : outputs) outputs_json.push_back(p.filename().generic_string());
  nlohmann::json j = {{"schema_version", 1},
                      {"tool", "ampforge"},
                      {"command", command},
                      {"config", config},
                      {"seed", seed},
                      {"inputs", inputs_json},
                      {"outputs", outputs_json}};
  if (stamp) j["timestamps"] = {{"started", started_at}, {"finished", iso_timestamp()}};
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

void write_manifest(const RunManifest& m, const fs::path& dir) {
  write_text(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

namespace {

void scale_pixels(std::vector<ImageSample>& samples) {
  double top = 0.0;
  for (const auto& s : samples)
    for (double p : s.pixels) top = std::max(top, p);
  if (top <= 1.0) return;
  for (auto& s : samples)
    for (double& p : s.pixels) p /= 255.0;
}

}  // namespace

Dataset load_images(const fs::path& input, std::size_t width, std::size_t height) {
  Dataset d;
  if (input.extension() == ".json") {
    const DatasetManifest m = load_manifest(input);
    d.width = m.width;
    d.height = m.height;
    for (const auto& f : m.files) {
      const fs::path p = input.parent_path() / f;
      auto rows = load_csv(p, m.width, m.height);
      d.samples.insert(d.samples.end(), rows.begin(), rows.end());
      d.files.push_back(p);
    }
  } else {
    if (width == 0 || height == 0) fail(ErrorCode::InvalidArgument, "CSV input needs --width and --height");
    d.width = width;
    d.height = height;
    d.samples = load_csv(input, width, height);
    d.files.push_back(input);
  }
  scale_pixels(d.samples);
  return d;
}

Dataset load_manifest_split(const fs::path& manifest, std::size_t index) {
  const DatasetManifest m = load_manifest(manifest);
  if (index >= m.files.size()) {
    fail(ErrorCode::ParseError, manifest.string() + " lists " + std::to_string(m.files.size()) +
                                    " files; a train and a test file are required");
  }
  Dataset d;
  d.width = m.width;
  d.height = m.height;
  const fs::path p = manifest.parent_path() / m.files[index];
  d.samples = load_csv(p, m.width, m.height);
  d.files = {p};
  scale_pixels(d.samples);
  return d;
}

void select_classes(Dataset& d, const std::vector<std::size_t>& classes) {
  if (classes.empty()) return;
  std::vector<ImageSample> kept;
  for (auto& s : d.samples) {
    const auto it = std::find(classes.begin(), classes.end(), s.label);
    if (it == classes.end()) continue;
    s.label = static_cast<std::size_t>(it - classes.begin());
    kept.push_back(std::move(s));
  }
  d.samples = std::move(kept);
}

void truncate(Dataset& d, std::size_t limit) {
  if (limit > 0 && d.samples.size() > limit) d.samples.resize(limit);
}

std::vector<LabelledState> load_states(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::ParseError, path.string() + ": expected an array of states");
  std::vector<LabelledState> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      std::vector<Complex> amps;
      for (const auto& a : j[i].at("amplitudes")) amps.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
      if (amps.size() < 2 || (amps.size() & (amps.size() - 1)) != 0) {
        fail(ErrorCode::ParseError, "state " + std::to_string(i) + ": length is not a power of two");
      }
      out.push_back({Statevector(std::move(amps)).normalized(), j[i].value("label", std::size_t{0})});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, path.string() + ": state " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') fail(ErrorCode::ParseError, "bad number '" + item + "' in list");
    out.push_back(v);
  }
  return out;
}

std::string iso_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ampforge::cli
