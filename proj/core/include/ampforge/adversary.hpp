#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ampforge/data.hpp"
#include "ampforge/encoding.hpp"
#include "ampforge/qvc.hpp"

namespace ampforge {

/// Dense feed-forward classifier: ReLU hidden layers, softmax output.
/// weights[l] is (sizes[l+1] x sizes[l]) row-major.
struct Mlp {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  /// Uniform Glorot initialisation from `seed`, zero biases.
  static Mlp create(std::vector<std::size_t> sizes, std::uint64_t seed);

  std::size_t input_size() const { return sizes.front(); }
  std::size_t n_classes() const { return sizes.back(); }
  std::size_t parameter_count() const;
};

std::vector<double> mlp_probabilities(const Mlp& net, std::span<const double> x);
std::size_t mlp_predict(const Mlp& net, std::span<const double> x);

struct MlpGradient {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  double loss = 0.0;
};

/// Mean cross-entropy and its gradient over the samples, by backpropagation.
MlpGradient mlp_gradient(const Mlp& net, std::span<const ImageSample> samples);
double mlp_loss(const Mlp& net, std::span<const ImageSample> samples);
/// d(-log p_label)/dx for one input.
std::vector<double> input_gradient(const Mlp& net, std::span<const double> x, std::size_t label);

struct MlpTrainConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  std::size_t hidden = 32;
};

/// Full-batch gradient descent; returns the loss before each epoch's update
/// followed by the final loss.
Mlp train_mlp(std::span<const ImageSample> data, std::size_t n_classes, const MlpTrainConfig& cfg,
              std::vector<double>* loss_history = nullptr);

double mlp_accuracy(const Mlp& net, std::span<const ImageSample> data);

struct AttackConfig {
  double epsilon = 0.0;
  double step_size = 0.0;
  std::size_t n_steps = 10;
  std::uint64_t seed = 0;
};

/// Attack grid entry of strength s: step size s, budget 4s, ten steps.
AttackConfig attack_for_strength(double strength, std::uint64_t seed);

/// PGD from a uniform random start in the epsilon ball: signed gradient
/// ascent on the loss, projected onto [0, 1] and the L-infinity ball.
ImageSample pgd_attack(const Mlp& net, const ImageSample& img, const AttackConfig& cfg);

struct QvcContestant {
  std::string name;
  const QvcModel* model = nullptr;
  EncodingSpec encoding;
};

struct TransferRow {
  std::string model;
  double strength = 0.0;
  double accuracy = 0.0;
};

/// Attacks every test image on the surrogate at each strength and scores the
/// surrogate ("mlp") and every QVC on the attacked images, each QVC re-encoding
/// them with its own encoding.
std::vector<TransferRow> transfer_evaluate(const Mlp& net, const std::vector<QvcContestant>& qvcs,
                                           std::span<const ImageSample> test, std::span<const double> strengths,
                                           std::uint64_t seed, std::size_t jobs = 1);

std::string transfer_csv(const std::vector<TransferRow>& rows);
nlohmann::json transfer_json(const std::vector<TransferRow>& rows);

nlohmann::json mlp_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace ampforge
