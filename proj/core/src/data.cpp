#include "ampforge/data.hpp"

#include <algorithm>
#include <charconv>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ampforge/error.hpp"

namespace ampforge {

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 20;

std::vector<double> padded_pixels(const ImageSample& img, std::size_t min_len) {
  if (img.pixels.size() != img.width * img.height) {
    fail(ErrorCode::DimensionMismatch, "image has " + std::to_string(img.pixels.size()) + " pixels, expected " +
                                           std::to_string(img.width * img.height));
  }
  if (img.pixels.size() > kMaxPixels) fail(ErrorCode::TooLarge, "image exceeds 2^20 pixels");
  std::vector<double> v = img.pixels;
  v.resize(std::bit_ceil(std::max(v.size(), min_len)), 0.0);
  return v;
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

const char* to_string(Encoding e) noexcept { return e == Encoding::Plain ? "plain" : "compressed"; }

EncodedSample encode_plain(const ImageSample& img) {
  const auto v = padded_pixels(img, 2);
  const double n = l2(v);
  if (!(n > 0.0)) fail(ErrorCode::AllZeroInput, "cannot encode an all-zero image");
  std::vector<Complex> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = v[i] / n;
  return {Statevector(std::move(a)), img.label, Encoding::Plain, 1.0};
}

EncodedSample encode_compressed(const ImageSample& img) {
  const auto v = padded_pixels(img, 4);
  const double n = l2(v);
  if (!(n > 0.0)) fail(ErrorCode::AllZeroInput, "cannot encode an all-zero image");
  std::vector<Complex> a(v.size() / 2);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = Complex(v[2 * i], v[2 * i + 1]) / n;
  return {Statevector(std::move(a)), img.label, Encoding::Compressed, 1.0};
}

ImageSample decode_compressed(const Statevector& state, std::size_t width, std::size_t height) {
  const std::size_t count = width * height;
  if (count == 0 || std::bit_ceil(std::max<std::size_t>(count, 4)) != 2 * state.dimension()) {
    fail(ErrorCode::DimensionMismatch, std::to_string(width) + "x" + std::to_string(height) +
                                           " image does not match a state of dimension " +
                                           std::to_string(state.dimension()));
  }
  ImageSample img{std::vector<double>(count), width, height, 0};
  for (std::size_t p = 0; p < count; ++p) {
    const Complex a = state[p / 2];
    img.pixels[p] = p % 2 == 0 ? a.real() : a.imag();
  }
  return img;
}

ImageSample pad_image(const ImageSample& img, std::size_t width, std::size_t height) {
  if (img.pixels.size() != img.width * img.height) fail(ErrorCode::DimensionMismatch, "image pixel count mismatch");
  if (width < img.width || height < img.height) fail(ErrorCode::DimensionMismatch, "canvas smaller than image");
  ImageSample out{std::vector<double>(width * height, 0.0), width, height, img.label};
  const std::size_t x0 = (width - img.width) / 2, y0 = (height - img.height) / 2;
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x) out.pixels[(y + y0) * width + x + x0] = img.pixels[y * img.width + x];
  return out;
}

ImageSample pad_to_power_of_two(const ImageSample& img) {
  return pad_image(img, std::bit_ceil(std::max<std::size_t>(img.width, 1)),
                   std::bit_ceil(std::max<std::size_t>(img.height, 1)));
}

std::vector<ImageSample> generate_shapes(std::size_t n_per_class, std::uint64_t seed) {
  if (n_per_class == 0) fail(ErrorCode::InvalidArgument, "need at least one image per class");
  constexpr std::size_t kSide = 8, kLength = 6;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> line(2, 5);   // row (or column) of the bar
  std::uniform_int_distribution<std::size_t> start(0, 2);  // offset along the bar, centred at 1
  std::vector<ImageSample> out;
  out.reserve(2 * n_per_class);
  for (std::size_t i = 0; i < n_per_class; ++i) {
    for (std::size_t label = 0; label < 2; ++label) {
      ImageSample img{std::vector<double>(kSide * kSide, 0.0), kSide, kSide, label};
      const std::size_t l = line(rng), s = start(rng);
      for (std::size_t t = s; t < s + kLength; ++t) {
        const std::size_t idx = label == 0 ? l * kSide + t : t * kSide + l;
        img.pixels[idx] = 1.0;
      }
      out.push_back(std::move(img));
    }
  }
  return out;
}

Statevector random_perturb(const Statevector& state, double target_fidelity, std::uint64_t seed) {
  if (!(target_fidelity > 0.0 && target_fidelity <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "target fidelity must lie in (0, 1]");
  }
  if (target_fidelity == 1.0) return state;
  const Statevector psi = state.normalized();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> g(psi.dimension());
  // Orthogonal part of a Gaussian draw; redraw in the measure-zero case where
  // it vanishes.
  for (;;) {
    for (auto& x : g) x = Complex(gauss(rng), gauss(rng));
    Complex proj = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) proj += std::conj(psi[i]) * g[i];
    double n = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] -= proj * psi[i];
      n += std::norm(g[i]);
    }
    if (n > 1e-20) {
      for (auto& x : g) x /= std::sqrt(n);
      break;
    }
  }
  const double c = std::sqrt(target_fidelity), s = std::sqrt(1.0 - target_fidelity);
  std::vector<Complex> out(psi.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * psi[i] + s * g[i];
  return Statevector(std::move(out)).normalized();
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<ImageSample> load_csv(const std::filesystem::path& path, std::size_t width, std::size_t height) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<ImageSample> out;
  std::string line;
  std::size_t row = 0;
  const std::size_t expected = width * height;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row == 1 && line.rfind("label", 0) == 0) continue;
    ImageSample img{{}, width, height, 0};
    img.pixels.reserve(expected);
    std::size_t col = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      const std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      pos = comma == std::string::npos ? line.size() + 1 : comma + 1;
      ++col;
      const char* b = field.c_str();
      char* e = nullptr;
      const double value = std::strtod(b, &e);
      if (field.empty() || e != b + field.size() || !std::isfinite(value)) {
        fail(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) + ", column " +
                                        std::to_string(col) + ": bad number '" + field + "'");
      }
      if (col == 1) {
        if (value < 0 || value != std::floor(value)) {
          fail(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) + ", column 1: bad label");
        }
        img.label = static_cast<std::size_t>(value);
      } else {
        img.pixels.push_back(value);
      }
    }
    if (img.pixels.size() != expected) {
      fail(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) + " has " +
                                      std::to_string(img.pixels.size()) + " pixels, expected " +
                                      std::to_string(expected));
    }
    out.push_back(std::move(img));
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<ImageSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& s : samples) {
    out << s.label;
    for (double p : s.pixels) out << ',' << format_double(p);
    out << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

nlohmann::json manifest_json(const DatasetManifest& m) {
  return {{"name", m.name}, {"width", m.width}, {"height", m.height}, {"classes", m.classes}, {"files", m.files}};
}

DatasetManifest parse_manifest(const nlohmann::json& j) {
  try {
    DatasetManifest m;
    m.name = j.value("name", "");
    m.width = j.at("width").get<std::size_t>();
    m.height = j.at("height").get<std::size_t>();
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.files = j.value("files", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("manifest: ") + e.what());
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return parse_manifest(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_pgm(const std::filesystem::path& path, const ImageSample& img) {
  if (img.pixels.size() != img.width * img.height) fail(ErrorCode::DimensionMismatch, "image pixel count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  double top = 0.0;
  for (double p : img.pixels) top = std::max(top, p);
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  for (double p : img.pixels) {
    const double scaled = top > 0 ? std::clamp(p / top, 0.0, 1.0) * 255.0 : 0.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(scaled))));
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace ampforge
