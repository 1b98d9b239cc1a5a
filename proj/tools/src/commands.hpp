#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "common.hpp"

namespace ampforge::cli {

struct DisentangleOptions {
  double fidelity = 0.6;
  std::size_t k = 2;
  std::string layout = "staircase";
  std::size_t max_sweeps = 200;
};

struct EncodeOptions {
  fs::path input;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t limit = 0;
  DisentangleOptions dis;
  fs::path qasm_out;
  fs::path pgm_out;
  bool dump_mps = false;
  bool baseline = false;
  bool allow_partial = false;
  CommonOptions common;
};

struct BenchOptions {
  fs::path input;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t limit = 0;
  std::size_t random = 0;
  std::size_t qubits = 5;
  DisentangleOptions dis;
  CommonOptions common;
};

struct ShapesOptions {
  std::size_t train_per_class = 50;
  std::size_t test_per_class = 50;
  CommonOptions common;
};

struct TrainOptions {
  fs::path manifest;
  std::string encoding = "exact";
  std::size_t layers = 4;
  std::size_t epochs = 30;
  double learning_rate = 0.01;
  std::size_t batch_size = 10;
  std::size_t readout = 0;
  std::vector<std::size_t> classes;
  std::string perturb_curve;
  std::size_t limit_train = 0;
  std::size_t limit_test = 0;
  CommonOptions common;
};

struct SurrogateOptions {
  fs::path manifest;
  std::size_t epochs = 200;
  double learning_rate = 0.5;
  std::size_t hidden = 32;
  std::vector<std::size_t> classes;
  std::size_t limit_train = 0;
  std::size_t limit_test = 0;
  CommonOptions common;
};

struct AttackOptions {
  fs::path manifest;
  fs::path surrogate;
  /// "name=checkpoint.json"; the encoding is read from the checkpoint.
  std::vector<std::string> qvcs;
  std::string strengths = "0,0.025,0.05,0.075,0.1";
  std::vector<std::size_t> classes;
  std::size_t limit_test = 0;
  CommonOptions common;
};

int cmd_encode(const EncodeOptions& o, std::ostream& log);
int cmd_bench(const BenchOptions& o, std::ostream& log);
int cmd_shapes(const ShapesOptions& o, std::ostream& log);
int cmd_train(const TrainOptions& o, std::ostream& log);
int cmd_train_surrogate(const SurrogateOptions& o, std::ostream& log);
int cmd_attack(const AttackOptions& o, std::ostream& log);

/// Per-sample seed derived from the run seed; `stream` separates uses.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t stream, std::size_t index);

}  // namespace ampforge::cli
