#include <fstream>
#include <ostream>
#include <sstream>

#include "ampforge/adversary.hpp"
#include "ampforge/encoding.hpp"
#include "ampforge/error.hpp"
#include "ampforge/parallel.hpp"
#include "ampforge/qvc.hpp"
#include "commands.hpp"

namespace ampforge::cli {

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

struct Splits {
  Dataset train;
  Dataset test;
  std::size_t n_classes = 0;
};

Splits load_splits(const fs::path& manifest, const std::vector<std::size_t>& classes, std::size_t limit_train,
                   std::size_t limit_test) {
  Splits s;
  s.train = load_manifest_split(manifest, 0);
  s.test = load_manifest_split(manifest, 1);
  const std::size_t listed = load_manifest(manifest).classes.size();
  for (std::size_t c : classes) {
    if (c >= listed) fail(ErrorCode::InvalidArgument, "class " + std::to_string(c) + " is not in the manifest");
  }
  select_classes(s.train, classes);
  select_classes(s.test, classes);
  truncate(s.train, limit_train);
  truncate(s.test, limit_test);
  s.n_classes = classes.empty() ? listed : classes.size();
  if (s.train.samples.empty()) fail(ErrorCode::EmptyBatch, "no training samples in " + manifest.string());
  if (s.test.samples.empty()) fail(ErrorCode::EmptyBatch, "no test samples in " + manifest.string());
  return s;
}

std::vector<LabeledState> encode_all(const EncodingSpec& spec, const std::vector<ImageSample>& images,
                                     std::uint64_t seed, std::uint64_t stream, std::size_t jobs) {
  std::vector<LabeledState> out(images.size());
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    const EncodedSample e = encode_image(spec, images[i], sample_seed(seed, stream, i));
    out[i] = {e.state, images[i].label};
  });
  return out;
}

nlohmann::json classes_json(const std::vector<std::size_t>& classes) { return nlohmann::json(classes); }

}  // namespace

int cmd_train(const TrainOptions& o, std::ostream& log) {
  RunManifest manifest;
  manifest.command = "train";
  manifest.stamp = o.common.stamp;
  manifest.started_at = iso_timestamp();
  manifest.seed = resolve_seed(o.common);
  const EncodingSpec spec = EncodingSpec::parse(o.encoding);
  const std::vector<double> curve = o.perturb_curve.empty() ? std::vector<double>{} : parse_double_list(o.perturb_curve);
  for (double f : curve) {
    if (!(f > 0.0 && f <= 1.0)) fail(ErrorCode::InvalidArgument, "perturb-curve fidelity out of (0, 1]: " + format_double(f));
  }
  manifest.config = {{"encoding", spec.to_string()},
                     {"layers", o.layers},
                     {"epochs", o.epochs},
                     {"learning_rate", o.learning_rate},
                     {"batch_size", o.batch_size},
                     {"readout", o.readout},
                     {"classes", classes_json(o.classes)},
                     {"perturb_curve", curve},
                     {"limit_train", o.limit_train},
                     {"limit_test", o.limit_test},
                     {"jobs", o.common.jobs}};

  const Splits s = load_splits(o.manifest, o.classes, o.limit_train, o.limit_test);
  manifest.inputs = {o.manifest, s.train.files[0], s.test.files[0]};
  const auto train_set = encode_all(spec, s.train.samples, manifest.seed, 2, o.common.jobs);
  const auto test_set = encode_all(spec, s.test.samples, manifest.seed, 3, o.common.jobs);

  QvcModel model = QvcModel::create(train_set.front().state.n_qubits(), o.layers, s.n_classes, manifest.seed, o.readout);
  TrainConfig cfg;
  cfg.learning_rate = o.learning_rate;
  cfg.batch_size = o.batch_size;
  cfg.epochs = o.epochs;
  cfg.seed = manifest.seed;
  cfg.jobs = o.common.jobs;
  const auto history = train(model, train_set, cfg);
  const Evaluation test_eval = evaluate(model, test_set, o.common.jobs);

  std::ostringstream hist;
  hist << "epoch,loss,accuracy\n";
  for (const auto& e : history) hist << e.epoch << ',' << format_double(e.loss) << ',' << format_double(e.accuracy) << '\n';

  nlohmann::json ckpt = checkpoint_json(model);
  ckpt["encoding"] = spec.to_string();
  ckpt["classes"] = classes_json(o.classes);

  nlohmann::json summary = {{"n_qubits", model.ansatz().n_qubits},
                            {"parameters", model.ansatz().parameter_count()},
                            {"train_samples", train_set.size()},
                            {"test_samples", test_set.size()},
                            {"test_loss", test_eval.loss},
                            {"test_accuracy", test_eval.accuracy}};
  if (!history.empty()) {
    summary["train_loss"] = history.back().loss;
    summary["train_accuracy"] = history.back().accuracy;
  }

  const fs::path& out = o.common.out;
  fs::create_directories(out);
  write_text(out / "checkpoint.json", ckpt.dump(2) + "\n");
  write_text(out / "history.csv", hist.str());
  manifest.outputs = {out / "checkpoint.json", out / "history.csv"};

  if (!curve.empty()) {
    const auto exact_test = encode_all(EncodingSpec{}, s.test.samples, manifest.seed, 3, o.common.jobs);
    std::ostringstream csv;
    csv << "fidelity,accuracy,loss\n";
    nlohmann::json points = nlohmann::json::array();
    for (double f : curve) {
      EncodingSpec perturb;
      perturb.kind = EncodingSpec::Kind::Perturb;
      perturb.fidelity = f;
      std::vector<LabeledState> noisy(exact_test.size());
      parallel_for(exact_test.size(), o.common.jobs, [&](std::size_t i) {
        EncodedSample e{exact_test[i].state, exact_test[i].label, Encoding::Compressed, 1.0};
        noisy[i] = {apply_encoding(perturb, std::move(e), sample_seed(manifest.seed, 4, i)).state, exact_test[i].label};
      });
      const Evaluation ev = evaluate(model, noisy, o.common.jobs);
      csv << format_double(f) << ',' << format_double(ev.accuracy) << ',' << format_double(ev.loss) << '\n';
      points.push_back({{"fidelity", f}, {"accuracy", ev.accuracy}});
    }
    summary["perturb_curve"] = points;
    write_text(out / "perturb_curve.csv", csv.str());
    manifest.outputs.push_back(out / "perturb_curve.csv");
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  manifest.outputs.push_back(out / "summary.json");
  write_manifest(manifest, out);
  log << "test accuracy " << test_eval.accuracy << " (" << spec.to_string() << ")\n";
  return kExitOk;
}

int cmd_train_surrogate(const SurrogateOptions& o, std::ostream& log) {
  RunManifest manifest;
  manifest.command = "train-surrogate";
  manifest.stamp = o.common.stamp;
  manifest.started_at = iso_timestamp();
  manifest.seed = resolve_seed(o.common);
  manifest.config = {{"epochs", o.epochs},
                     {"learning_rate", o.learning_rate},
                     {"hidden", o.hidden},
                     {"classes", classes_json(o.classes)},
                     {"limit_train", o.limit_train},
                     {"limit_test", o.limit_test}};

  const Splits s = load_splits(o.manifest, o.classes, o.limit_train, o.limit_test);
  manifest.inputs = {o.manifest, s.train.files[0], s.test.files[0]};
  MlpTrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.learning_rate = o.learning_rate;
  cfg.hidden = o.hidden;
  cfg.seed = manifest.seed;
  std::vector<double> losses;
  const Mlp net = train_mlp(s.train.samples, s.n_classes, cfg, &losses);

  std::ostringstream hist;
  hist << "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) hist << e << ',' << format_double(losses[e]) << '\n';
  nlohmann::json model = mlp_json(net);
  model["classes"] = classes_json(o.classes);
  const double train_acc = mlp_accuracy(net, s.train.samples);
  const double test_acc = mlp_accuracy(net, s.test.samples);
  const nlohmann::json summary = {{"parameters", net.parameter_count()},
                                  {"train_accuracy", train_acc},
                                  {"test_accuracy", test_acc},
                                  {"final_loss", losses.empty() ? 0.0 : losses.back()}};

  const fs::path& out = o.common.out;
  fs::create_directories(out);
  write_text(out / "surrogate.json", model.dump(2) + "\n");
  write_text(out / "surrogate_history.csv", hist.str());
  write_text(out / "summary.json", summary.dump(2) + "\n");
  manifest.outputs = {out / "surrogate.json", out / "surrogate_history.csv", out / "summary.json"};
  write_manifest(manifest, out);
  log << "surrogate test accuracy " << test_acc << "\n";
  return kExitOk;
}

int cmd_attack(const AttackOptions& o, std::ostream& log) {
  RunManifest manifest;
  manifest.command = "attack";
  manifest.stamp = o.common.stamp;
  manifest.started_at = iso_timestamp();
  manifest.seed = resolve_seed(o.common);
  const std::vector<double> strengths = parse_double_list(o.strengths);
  for (double v : strengths) {
    if (v < 0.0) fail(ErrorCode::InvalidArgument, "attack strengths must be non-negative");
  }
  manifest.config = {{"strengths", strengths},
                     {"qvcs", o.qvcs},
                     {"classes", classes_json(o.classes)},
                     {"limit_test", o.limit_test},
                     {"jobs", o.common.jobs}};

  Dataset test = load_manifest_split(o.manifest, 1);
  select_classes(test, o.classes);
  truncate(test, o.limit_test);
  if (test.samples.empty()) fail(ErrorCode::EmptyBatch, "no test samples in " + o.manifest.string());
  const Mlp net = mlp_from_json(read_json(o.surrogate));
  if (net.input_size() != test.width * test.height) {
    fail(ErrorCode::DimensionMismatch, "surrogate expects " + std::to_string(net.input_size()) + " pixels");
  }
  manifest.inputs = {o.manifest, test.files[0], o.surrogate};

  std::vector<QvcModel> models;
  std::vector<std::string> names;
  std::vector<EncodingSpec> encodings;
  models.reserve(o.qvcs.size());
  for (const auto& entry : o.qvcs) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorCode::ParseError, "--qvc expects name=checkpoint.json, got " + entry);
    const fs::path path = entry.substr(eq + 1);
    const nlohmann::json j = read_json(path);
    models.push_back(model_from_checkpoint(j));
    names.push_back(entry.substr(0, eq));
    encodings.push_back(EncodingSpec::parse(j.value("encoding", std::string("exact"))));
    manifest.inputs.push_back(path);
  }
  std::vector<QvcContestant> contestants;
  for (std::size_t q = 0; q < models.size(); ++q) contestants.push_back({names[q], &models[q], encodings[q]});

  const auto rows = transfer_evaluate(net, contestants, test.samples, strengths, manifest.seed, o.common.jobs);
  const fs::path& out = o.common.out;
  fs::create_directories(out);
  write_text(out / "attack.csv", transfer_csv(rows));
  const nlohmann::json report = {
      {"surrogate", {{"architecture", "dense-mlp"}, {"layer_sizes", net.sizes},
                     {"note", "fully connected surrogate; no convolutional layers"}}},
      {"attack", {{"method", "pgd-linf"}, {"steps", attack_for_strength(1.0, 0).n_steps},
                  {"step_size", "strength"}, {"epsilon", "4 * strength"}}},
      {"rows", transfer_json(rows)}};
  write_text(out / "attack.json", report.dump(2) + "\n");
  manifest.outputs = {out / "attack.csv", out / "attack.json"};
  write_manifest(manifest, out);
  for (const auto& r : rows) {
    if (r.strength == strengths.back()) log << r.model << " at strength " << r.strength << ": " << r.accuracy << "\n";
  }
  return kExitOk;
}

}  // namespace ampforge::cli
