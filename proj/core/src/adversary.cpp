#include "ampforge/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ampforge/error.hpp"
#include "ampforge/parallel.hpp"

namespace ampforge {

namespace {

struct Activations {
  std::vector<std::vector<double>> a;  // a[0] = input, a[L] = probabilities
  std::vector<std::vector<double>> z;  // pre-activations per layer
};

Activations forward(const Mlp& net, std::span<const double> x) {
  if (x.size() != net.input_size()) {
    fail(ErrorCode::DimensionMismatch, "network expects " + std::to_string(net.input_size()) + " inputs, got " +
                                           std::to_string(x.size()));
  }
  const std::size_t layers = net.weights.size();
  Activations act;
  act.a.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = net.sizes[l], out = net.sizes[l + 1];
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = net.biases[l][o];
      for (std::size_t i = 0; i < in; ++i) acc += net.weights[l][o * in + i] * act.a[l][i];
      z[o] = acc;
    }
    act.z.push_back(z);
    if (l + 1 < layers) {
      for (auto& v : z) v = std::max(v, 0.0);
      act.a.push_back(std::move(z));
    } else {
      act.a.push_back(softmax(z));
    }
  }
  return act;
}

// Accumulates the gradient of -log p_label into g (if given) and returns the
// gradient with respect to the input.
std::vector<double> backward(const Mlp& net, const Activations& act, std::size_t label, MlpGradient* g) {
  const std::size_t layers = net.weights.size();
  std::vector<double> delta = act.a.back();
  delta[label] -= 1.0;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = net.sizes[l], out = net.sizes[l + 1];
    if (g) {
      for (std::size_t o = 0; o < out; ++o) {
        g->biases[l][o] += delta[o];
        for (std::size_t i = 0; i < in; ++i) g->weights[l][o * in + i] += delta[o] * act.a[l][i];
      }
    }
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o)
      for (std::size_t i = 0; i < in; ++i) prev[i] += net.weights[l][o * in + i] * delta[o];
    if (l > 0) {
      for (std::size_t i = 0; i < in; ++i)
        if (act.z[l - 1][i] <= 0.0) prev[i] = 0.0;
    }
    delta = std::move(prev);
  }
  return delta;
}

void check_label(const Mlp& net, std::size_t label) {
  if (label >= net.n_classes()) fail(ErrorCode::InvalidArgument, "label outside the network's classes");
}

}  // namespace

Mlp Mlp::create(std::vector<std::size_t> sizes, std::uint64_t seed) {
  if (sizes.size() < 2) fail(ErrorCode::InvalidArgument, "network needs input and output sizes");
  for (auto s : sizes)
    if (s == 0) fail(ErrorCode::InvalidArgument, "layer sizes must be positive");
  Mlp net;
  net.sizes = std::move(sizes);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    const std::size_t in = net.sizes[l], out = net.sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> init(-bound, bound);
    std::vector<double> w(in * out);
    for (auto& x : w) x = init(rng);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(out, 0.0);
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

std::vector<double> mlp_probabilities(const Mlp& net, std::span<const double> x) { return forward(net, x).a.back(); }

std::size_t mlp_predict(const Mlp& net, std::span<const double> x) { return argmax(mlp_probabilities(net, x)); }

MlpGradient mlp_gradient(const Mlp& net, std::span<const ImageSample> samples) {
  if (samples.empty()) fail(ErrorCode::EmptyBatch, "no samples");
  MlpGradient g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.emplace_back(net.weights[l].size(), 0.0);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }
  for (const auto& s : samples) {
    check_label(net, s.label);
    const Activations act = forward(net, s.pixels);
    g.loss -= std::log(std::max(act.a.back()[s.label], 1e-300));
    backward(net, act, s.label, &g);
  }
  const double scale = 1.0 / static_cast<double>(samples.size());
  g.loss *= scale;
  for (auto& w : g.weights)
    for (auto& x : w) x *= scale;
  for (auto& b : g.biases)
    for (auto& x : b) x *= scale;
  return g;
}

double mlp_loss(const Mlp& net, std::span<const ImageSample> samples) {
  if (samples.empty()) fail(ErrorCode::EmptyBatch, "no samples");
  double total = 0.0;
  for (const auto& s : samples) {
    check_label(net, s.label);
    total -= std::log(std::max(mlp_probabilities(net, s.pixels)[s.label], 1e-300));
  }
  return total / static_cast<double>(samples.size());
}

std::vector<double> input_gradient(const Mlp& net, std::span<const double> x, std::size_t label) {
  check_label(net, label);
  return backward(net, forward(net, x), label, nullptr);
}

Mlp train_mlp(std::span<const ImageSample> data, std::size_t n_classes, const MlpTrainConfig& cfg,
              std::vector<double>* loss_history) {
  if (data.empty()) fail(ErrorCode::EmptyBatch, "no training samples");
  Mlp net = Mlp::create({data.front().pixels.size(), cfg.hidden, n_classes}, cfg.seed);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const MlpGradient g = mlp_gradient(net, data);
    if (loss_history) loss_history->push_back(g.loss);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      for (std::size_t i = 0; i < net.weights[l].size(); ++i) net.weights[l][i] -= cfg.learning_rate * g.weights[l][i];
      for (std::size_t i = 0; i < net.biases[l].size(); ++i) net.biases[l][i] -= cfg.learning_rate * g.biases[l][i];
    }
  }
  if (loss_history) loss_history->push_back(mlp_loss(net, data));
  return net;
}

double mlp_accuracy(const Mlp& net, std::span<const ImageSample> data) {
  if (data.empty()) fail(ErrorCode::EmptyBatch, "no samples");
  std::size_t correct = 0;
  for (const auto& s : data) correct += mlp_predict(net, s.pixels) == s.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

AttackConfig attack_for_strength(double strength, std::uint64_t seed) {
  return {4.0 * strength, strength, 10, seed};
}

ImageSample pgd_attack(const Mlp& net, const ImageSample& img, const AttackConfig& cfg) {
  if (cfg.epsilon < 0 || cfg.step_size < 0 || cfg.n_steps == 0) {
    fail(ErrorCode::InvalidArgument, "attack needs non-negative epsilon and step, and at least one step");
  }
  ImageSample out = img;
  if (cfg.epsilon == 0.0) return out;
  const auto& x0 = img.pixels;
  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lo = std::max(0.0, x0[i] - cfg.epsilon), hi = std::min(1.0, x0[i] + cfg.epsilon);
      x[i] = std::clamp(x[i], std::min(lo, hi), std::max(lo, hi));
    }
  };
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> start(-cfg.epsilon, cfg.epsilon);
  auto& x = out.pixels;
  for (auto& v : x) v += start(rng);
  project(x);
  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    const auto g = input_gradient(net, x, img.label);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += cfg.step_size * static_cast<double>((g[i] > 0) - (g[i] < 0));
    project(x);
  }
  return out;
}

std::vector<TransferRow> transfer_evaluate(const Mlp& net, const std::vector<QvcContestant>& qvcs,
                                           std::span<const ImageSample> test, std::span<const double> strengths,
                                           std::uint64_t seed, std::size_t jobs) {
  if (test.empty()) fail(ErrorCode::EmptyBatch, "no test images");
  std::vector<TransferRow> rows;
  for (double s : strengths) {
    std::vector<int> mlp_ok(test.size());
    std::vector<std::vector<int>> qvc_ok(qvcs.size(), std::vector<int>(test.size()));
    parallel_for(test.size(), jobs, [&](std::size_t i) {
      const std::uint64_t image_seed = seed * 1000003ULL + i;
      const ImageSample attacked = pgd_attack(net, test[i], attack_for_strength(s, image_seed));
      mlp_ok[i] = mlp_predict(net, attacked.pixels) == test[i].label;
      for (std::size_t q = 0; q < qvcs.size(); ++q) {
        const EncodedSample e = encode_image(qvcs[q].encoding, attacked, image_seed);
        qvc_ok[q][i] = predict(*qvcs[q].model, e.state).label == test[i].label;
      }
    });
    auto accuracy = [&](const std::vector<int>& ok) {
      double c = 0;
      for (int v : ok) c += v;
      return c / static_cast<double>(ok.size());
    };
    rows.push_back({"mlp", s, accuracy(mlp_ok)});
    for (std::size_t q = 0; q < qvcs.size(); ++q) rows.push_back({qvcs[q].name, s, accuracy(qvc_ok[q])});
  }
  return rows;
}

std::string transfer_csv(const std::vector<TransferRow>& rows) {
  std::ostringstream out;
  out << "model,strength,accuracy\n";
  for (const auto& r : rows) out << r.model << ',' << format_double(r.strength) << ',' << format_double(r.accuracy) << '\n';
  return out.str();
}

nlohmann::json transfer_json(const std::vector<TransferRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) out.push_back({{"model", r.model}, {"strength", r.strength}, {"accuracy", r.accuracy}});
  return out;
}

nlohmann::json mlp_json(const Mlp& net) {
  return {{"format", "ampforge-mlp"},
          {"version", 1},
          {"sizes", net.sizes},
          {"activation", "relu"},
          {"weights", net.weights},
          {"biases", net.biases}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "ampforge-mlp") fail(ErrorCode::ParseError, "not an MLP checkpoint");
    Mlp net;
    net.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    if (net.sizes.size() < 2 || net.weights.size() + 1 != net.sizes.size() || net.biases.size() != net.weights.size()) {
      fail(ErrorCode::ParseError, "MLP checkpoint layers are inconsistent");
    }
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      if (net.weights[l].size() != net.sizes[l] * net.sizes[l + 1] || net.biases[l].size() != net.sizes[l + 1]) {
        fail(ErrorCode::ParseError, "MLP checkpoint layer " + std::to_string(l) + " has the wrong size");
      }
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("MLP checkpoint: ") + e.what());
  }
}

}  // namespace ampforge
