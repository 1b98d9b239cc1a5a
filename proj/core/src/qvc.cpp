#include "ampforge/qvc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "ampforge/error.hpp"
#include "ampforge/parallel.hpp"

namespace ampforge {

Circuit Ansatz::circuit(std::span<const double> theta) const {
  if (theta.size() != parameter_count()) {
    fail(ErrorCode::DimensionMismatch, "ansatz expects " + std::to_string(parameter_count()) + " parameters, got " +
                                           std::to_string(theta.size()));
  }
  Circuit c(n_qubits);
  std::size_t p = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (std::size_t q = 0; q < n_qubits; ++q) {
      c.add(Gate::ry(q, theta[p++]));
      c.add(Gate::rz(q, theta[p++]));
    }
    for (std::size_t q = 0; q + 1 < n_qubits; ++q) c.add(Gate::cnot(q, q + 1));
  }
  return c;
}

QvcModel QvcModel::create(std::size_t n_qubits, std::size_t n_layers, std::size_t n_classes, std::uint64_t seed,
                          std::size_t readout_qubit) {
  if (n_qubits == 0) fail(ErrorCode::InvalidArgument, "model needs at least one qubit");
  if (n_classes < 2) fail(ErrorCode::InvalidArgument, "model needs at least two classes");
  if (n_classes > 2 && n_classes > n_qubits) {
    fail(ErrorCode::DimensionMismatch,
         std::to_string(n_classes) + " classes need as many readout qubits, have " + std::to_string(n_qubits));
  }
  if (readout_qubit >= n_qubits) fail(ErrorCode::IndexOutOfRange, "readout qubit out of range");
  QvcModel m;
  m.ansatz_ = {n_qubits, n_layers};
  m.seed_ = seed;
  m.readout_qubit_ = readout_qubit;
  if (n_classes == 2) {
    m.observables_ = {Observable::z_string({readout_qubit}, 1.0), Observable::z_string({readout_qubit}, -1.0)};
  } else {
    for (std::size_t j = 0; j < n_classes; ++j) m.observables_.push_back(Observable::z_string({j}));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-0.1, 0.1);
  m.theta.resize(m.ansatz_.parameter_count());
  for (auto& t : m.theta) t = init(rng);
  m.adam.m.assign(m.theta.size(), 0.0);
  m.adam.v.assign(m.theta.size(), 0.0);
  return m;
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) return {};
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) total += p[i] = std::exp(scores[i] - top);
  for (auto& x : p) x /= total;
  return p;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

namespace {

std::vector<double> readout(const QvcModel& model, const SimState& s) {
  std::vector<double> e;
  e.reserve(model.n_classes());
  for (const auto& o : model.observables()) e.push_back(o.expectation(s));
  return e;
}

void check_input(const QvcModel& model, const Statevector& input) {
  if (input.n_qubits() != model.ansatz().n_qubits) {
    fail(ErrorCode::DimensionMismatch, "input has " + std::to_string(input.n_qubits()) + " qubits, model expects " +
                                           std::to_string(model.ansatz().n_qubits));
  }
}

void check_batch(const QvcModel& model, std::span<const LabeledState> batch) {
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "batch is empty");
  for (const auto& s : batch) {
    check_input(model, s.state);
    if (s.label >= model.n_classes()) fail(ErrorCode::InvalidArgument, "label outside the model's classes");
  }
}

double sample_loss(const std::vector<double>& expectations, std::size_t label) {
  const auto p = softmax(expectations);
  return -std::log(std::max(p[label], 1e-300));
}

// d(-log p_y)/dtheta for one sample: sum_j (p_j - [j == y]) dE_j/dtheta.
std::vector<double> sample_gradient(const QvcModel& model, const LabeledState& s) {
  const std::vector<double> base = class_expectations(model, model.theta, s.state);
  std::vector<double> weight = softmax(base);
  weight[s.label] -= 1.0;

  std::vector<double> g(model.theta.size(), 0.0);
  std::vector<double> shifted = model.theta;
  constexpr double kShift = std::numbers::pi / 2;
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    shifted[k] = model.theta[k] + kShift;
    const auto plus = class_expectations(model, shifted, s.state);
    shifted[k] = model.theta[k] - kShift;
    const auto minus = class_expectations(model, shifted, s.state);
    shifted[k] = model.theta[k];
    double acc = 0.0;
    for (std::size_t j = 0; j < weight.size(); ++j) acc += weight[j] * 0.5 * (plus[j] - minus[j]);
    g[k] = acc;
  }
  return g;
}

}  // namespace

std::vector<double> class_expectations(const QvcModel& model, const Statevector& input) {
  return class_expectations(model, model.theta, input);
}

std::vector<double> class_expectations(const QvcModel& model, std::span<const double> theta,
                                       const Statevector& input) {
  check_input(model, input);
  return readout(model, run(model.ansatz().circuit(theta), SimState(input)));
}

Prediction predict(const QvcModel& model, const Statevector& input) {
  Prediction p;
  p.expectations = class_expectations(model, input);
  p.probabilities = softmax(p.expectations);
  p.label = argmax(p.expectations);
  return p;
}

double loss(const QvcModel& model, std::span<const LabeledState> batch) { return loss(model, model.theta, batch); }

double loss(const QvcModel& model, std::span<const double> theta, std::span<const LabeledState> batch) {
  check_batch(model, batch);
  double total = 0.0;
  for (const auto& s : batch) total += sample_loss(class_expectations(model, theta, s.state), s.label);
  return total / static_cast<double>(batch.size());
}

std::vector<double> gradient(const QvcModel& model, std::span<const LabeledState> batch, std::size_t jobs) {
  check_batch(model, batch);
  std::vector<std::vector<double>> per_sample(batch.size());
  parallel_for(batch.size(), jobs, [&](std::size_t i) { per_sample[i] = sample_gradient(model, batch[i]); });
  std::vector<double> g(model.theta.size(), 0.0);
  for (const auto& ps : per_sample)
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += ps[k];
  for (auto& x : g) x /= static_cast<double>(batch.size());
  return g;
}

Evaluation evaluate(const QvcModel& model, std::span<const LabeledState> data, std::size_t jobs) {
  check_batch(model, data);
  std::vector<double> losses(data.size());
  std::vector<int> correct(data.size());
  parallel_for(data.size(), jobs, [&](std::size_t i) {
    const auto e = class_expectations(model, data[i].state);
    losses[i] = sample_loss(e, data[i].label);
    correct[i] = argmax(e) == data[i].label ? 1 : 0;
  });
  Evaluation ev;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ev.loss += losses[i];
    ev.accuracy += correct[i];
  }
  ev.loss /= static_cast<double>(data.size());
  ev.accuracy /= static_cast<double>(data.size());
  return ev;
}

void adam_step(QvcModel& model, std::span<const double> grad, const TrainConfig& cfg) {
  auto& st = model.adam;
  if (grad.size() != model.theta.size()) fail(ErrorCode::DimensionMismatch, "gradient size differs from theta");
  if (st.m.size() != grad.size()) st.m.assign(grad.size(), 0.0);
  if (st.v.size() != grad.size()) st.v.assign(grad.size(), 0.0);
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  for (std::size_t k = 0; k < grad.size(); ++k) {
    st.m[k] = cfg.beta1 * st.m[k] + (1.0 - cfg.beta1) * grad[k];
    st.v[k] = cfg.beta2 * st.v[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
    model.theta[k] -= cfg.learning_rate * (st.m[k] / c1) / (std::sqrt(st.v[k] / c2) + cfg.epsilon);
  }
}

std::vector<EpochStats> train(QvcModel& model, std::span<const LabeledState> data, const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0) || cfg.batch_size == 0) {
    fail(ErrorCode::InvalidArgument, "learning rate and batch size must be positive");
  }
  check_batch(model, data);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<EpochStats> history;
  std::vector<LabeledState> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
        batch.push_back(data[order[i]]);
      }
      adam_step(model, gradient(model, batch, cfg.jobs), cfg);
    }
    ++model.epochs_trained;
    const Evaluation ev = evaluate(model, data, cfg.jobs);
    history.push_back({epoch + 1, ev.loss, ev.accuracy});
  }
  return history;
}

nlohmann::json checkpoint_json(const QvcModel& model) {
  return {{"format", "ampforge-qvc"},
          {"version", 1},
          {"ansatz",
           {{"template", "ry_rz_cnot_line"},
            {"n_qubits", model.ansatz().n_qubits},
            {"n_layers", model.ansatz().n_layers}}},
          {"n_classes", model.n_classes()},
          {"readout_qubit", model.readout_qubit()},
          {"theta", model.theta},
          {"adam", {{"m", model.adam.m}, {"v", model.adam.v}, {"step", model.adam.step}}},
          {"seed", model.seed()},
          {"epochs_trained", model.epochs_trained}};
}

QvcModel model_from_checkpoint(const nlohmann::json& j) {
  try {
    if (j.at("format") != "ampforge-qvc") fail(ErrorCode::ParseError, "not a QVC checkpoint");
    const auto& a = j.at("ansatz");
    QvcModel m = QvcModel::create(a.at("n_qubits").get<std::size_t>(), a.at("n_layers").get<std::size_t>(),
                                  j.at("n_classes").get<std::size_t>(), j.at("seed").get<std::uint64_t>(),
                                  j.at("readout_qubit").get<std::size_t>());
    auto theta = j.at("theta").get<std::vector<double>>();
    if (theta.size() != m.theta.size()) fail(ErrorCode::ParseError, "checkpoint theta has the wrong length");
    m.theta = std::move(theta);
    m.adam.m = j.at("adam").at("m").get<std::vector<double>>();
    m.adam.v = j.at("adam").at("v").get<std::vector<double>>();
    m.adam.step = j.at("adam").at("step").get<std::uint64_t>();
    m.epochs_trained = j.at("epochs_trained").get<std::uint64_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("checkpoint: ") + e.what());
  }
}

}  // namespace ampforge
