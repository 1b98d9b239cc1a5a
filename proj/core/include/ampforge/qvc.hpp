#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ampforge/circuit.hpp"
#include "ampforge/mps.hpp"
#include "ampforge/simulator.hpp"

namespace ampforge {

/// Layered circuit: every layer applies RY then RZ to each qubit, followed by
/// a CNOT line 0->1->...->N-1. Parameters are ordered layer, qubit, (ry, rz).
struct Ansatz {
  std::size_t n_qubits = 1;
  std::size_t n_layers = 1;

  std::size_t parameter_count() const noexcept { return 2 * n_qubits * n_layers; }
  Circuit circuit(std::span<const double> theta) const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

class QvcModel {
 public:
  /// theta ~ U(-0.1, 0.1) from `seed`. For two classes the scores are
  /// +<Z_r> and -<Z_r> on the readout qubit r; for m > 2 class j reads <Z_j>.
  static QvcModel create(std::size_t n_qubits, std::size_t n_layers, std::size_t n_classes, std::uint64_t seed,
                         std::size_t readout_qubit = 0);

  const Ansatz& ansatz() const noexcept { return ansatz_; }
  std::size_t n_classes() const noexcept { return observables_.size(); }
  std::size_t readout_qubit() const noexcept { return readout_qubit_; }
  const std::vector<Observable>& observables() const noexcept { return observables_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<double> theta;
  AdamState adam;
  std::uint64_t epochs_trained = 0;

 private:
  Ansatz ansatz_;
  std::vector<Observable> observables_;
  std::size_t readout_qubit_ = 0;
  std::uint64_t seed_ = 0;
};

struct LabeledState {
  Statevector state;
  std::size_t label = 0;
};

struct Prediction {
  std::size_t label = 0;
  std::vector<double> expectations;
  std::vector<double> probabilities;
};

/// Softmax; stable under a common shift of the inputs.
std::vector<double> softmax(std::span<const double> scores);
/// Index of the largest value, lowest index on ties.
std::size_t argmax(std::span<const double> values);

/// Class scores <v|U^dagger O_j U|v> of `theta` (defaults to model.theta).
std::vector<double> class_expectations(const QvcModel& model, const Statevector& input);
std::vector<double> class_expectations(const QvcModel& model, std::span<const double> theta,
                                       const Statevector& input);

Prediction predict(const QvcModel& model, const Statevector& input);

/// Mean cross-entropy -log p_y over the batch; EmptyBatch if empty.
double loss(const QvcModel& model, std::span<const LabeledState> batch);
double loss(const QvcModel& model, std::span<const double> theta, std::span<const LabeledState> batch);

/// Exact gradient of loss() by the parameter-shift rule.
std::vector<double> gradient(const QvcModel& model, std::span<const LabeledState> batch, std::size_t jobs = 1);

struct TrainConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 16;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const QvcModel& model, std::span<const LabeledState> data, std::size_t jobs = 1);

/// One bias-corrected ADAM step on model.theta.
void adam_step(QvcModel& model, std::span<const double> grad, const TrainConfig& cfg);

/// Mini-batch ADAM. Shuffling is seeded by cfg.seed; history holds the
/// full-set loss and accuracy after each epoch.
std::vector<EpochStats> train(QvcModel& model, std::span<const LabeledState> data, const TrainConfig& cfg);

nlohmann::json checkpoint_json(const QvcModel& model);
QvcModel model_from_checkpoint(const nlohmann::json& j);

}  // namespace ampforge
