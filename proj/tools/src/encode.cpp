#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "ampforge/circuit.hpp"
#include "ampforge/disentangler.hpp"
#include "ampforge/encoding.hpp"
#include "ampforge/error.hpp"
#include "ampforge/parallel.hpp"
#include "commands.hpp"

namespace ampforge::cli {

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t stream, std::size_t index) {
  return (seed * 1000003ULL + index) ^ (stream * 0x9E3779B97F4A7C15ULL);
}

namespace {

struct InputItem {
  Statevector state;
  std::size_t label = 0;
  bool image = false;
  std::size_t width = 0;  // padded image geometry
  std::size_t height = 0;
};

struct Inputs {
  std::vector<InputItem> items;
  std::vector<fs::path> files;
};

bool is_state_file(const fs::path& path) {
  std::ifstream in(path);
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  return in && c == '[';
}

Inputs load_inputs(const fs::path& path, std::size_t width, std::size_t height, std::size_t limit) {
  if (!fs::exists(path)) fail(ErrorCode::IoError, "no such file: " + path.string());
  Inputs in;
  if (path.extension() == ".json" && is_state_file(path)) {
    for (auto& s : load_states(path)) in.items.push_back({std::move(s.state), s.label});
    in.files = {path};
  } else {
    Dataset d = load_images(path, width, height);
    truncate(d, limit);
    for (const auto& img : d.samples) {
      const ImageSample padded = pad_to_power_of_two(img);
      in.items.push_back({encode_compressed(padded).state, img.label, true, padded.width, padded.height});
    }
    in.files = d.files;
  }
  if (limit > 0 && in.items.size() > limit) in.items.resize(limit);
  if (in.items.empty()) fail(ErrorCode::EmptyBatch, "no samples in " + path.string());
  return in;
}

DisentangleConfig make_config(const DisentangleOptions& o, std::size_t n_qubits) {
  if (!(o.fidelity > 0.0 && o.fidelity <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "--fidelity must lie in (0, 1], got " + format_double(o.fidelity));
  }
  if (o.k < 2) fail(ErrorCode::InvalidArgument, "--k must be at least 2");
  DisentangleConfig cfg;
  cfg.k = std::min(o.k, n_qubits);
  cfg.target_fidelity = o.fidelity;
  cfg.max_sweeps = o.max_sweeps;
  cfg.layout = parse_layout(o.layout);
  return cfg;
}

nlohmann::json disentangle_config_json(const DisentangleOptions& o) {
  return {{"fidelity", o.fidelity}, {"k", o.k}, {"layout", o.layout}, {"max_sweeps", o.max_sweeps}};
}

bool has_imaginary_part(const Statevector& v) {
  const auto& amps = v.amplitudes();
  return std::any_of(amps.begin(), amps.end(), [](const Complex& a) { return std::abs(a.imag()) > 1e-12; });
}

std::string sample_name(std::size_t i, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "sample_%05zu%s", i, suffix);
  return buf;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

Statevector random_state(std::size_t n_qubits, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Complex> a(std::size_t{1} << n_qubits);
  for (auto& z : a) {
    const double re = g(rng);
    z = Complex(re, g(rng));
  }
  return Statevector(std::move(a)).normalized();
}

}  // namespace

int cmd_encode(const EncodeOptions& o, std::ostream& log) {
  RunManifest manifest;
  manifest.command = "encode";
  manifest.stamp = o.common.stamp;
  manifest.started_at = iso_timestamp();
  manifest.seed = resolve_seed(o.common);
  manifest.config = {{"disentangle", disentangle_config_json(o.dis)},
                     {"width", o.width},
                     {"height", o.height},
                     {"limit", o.limit},
                     {"baseline", o.baseline},
                     {"allow_partial", o.allow_partial},
                     {"dump_mps", o.dump_mps},
                     {"qasm_out", o.qasm_out.generic_string()},
                     {"pgm_out", o.pgm_out.generic_string()},
                     {"jobs", o.common.jobs}};

  const Inputs in = load_inputs(o.input, o.width, o.height, o.limit);
  manifest.inputs = in.files;
  if (!o.qasm_out.empty() && o.dis.k != 2) {
    fail(ErrorCode::InvalidArgument, "--qasm-out needs --k 2; larger blocks have no elementary decomposition");
  }
  for (const auto& item : in.items) (void)make_config(o.dis, item.state.n_qubits());
  if (!o.qasm_out.empty()) fs::create_directories(o.qasm_out);
  if (!o.pgm_out.empty()) fs::create_directories(o.pgm_out);

  std::vector<nlohmann::json> records(in.items.size());
  std::vector<int> converged(in.items.size());
  parallel_for(in.items.size(), o.common.jobs, [&](std::size_t i) {
    const InputItem& item = in.items[i];
    const std::size_t n = item.state.n_qubits();
    const DisentangleReport report = disentangle_partial(item.state, make_config(o.dis, n));
    const Circuit program = preparation_program(report);
    nlohmann::json r = report_json(report);
    r["index"] = i;
    r["label"] = item.label;
    r["target_fidelity"] = o.dis.fidelity;
    r["cnot_count"] = cnot_count(program);
    if (o.baseline && n <= 6) {
      r["baseline_cnot_count"] = cnot_count(exact_prep_baseline(item.state));
      r["baseline_formula_cnot_count"] = exact_prep_cnot_formula(n, has_imaginary_part(item.state));
    }
    if (!o.qasm_out.empty()) {
      const std::string name = sample_name(i, ".qasm");
      write_text(o.qasm_out / name, export_qasm(decompose(program)));
      r["qasm"] = name;
    }
    if (o.dump_mps) r["mps"] = mps_debug_json(from_statevector(item.state));
    if (!o.pgm_out.empty() && item.image) {
      write_pgm(o.pgm_out / sample_name(i, "_input.pgm"), decode_compressed(item.state, item.width, item.height));
      write_pgm(o.pgm_out / sample_name(i, "_prepared.pgm"),
                decode_compressed(prepared_state(report), item.width, item.height));
    }
    converged[i] = report.converged;
    records[i] = std::move(r);
  });

  std::string lines;
  std::size_t n_converged = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    lines += records[i].dump() + "\n";
    n_converged += converged[i];
    if (!converged[i]) {
      log << "warning: sample " << i << " stopped at fidelity " << records[i]["achieved_fidelity"].get<double>()
          << " after " << records[i]["sweeps"] << " sweeps\n";
    }
  }
  fs::create_directories(o.common.out);
  write_text(o.common.out / "encode.jsonl", lines);
  manifest.outputs = {o.common.out / "encode.jsonl"};
  write_manifest(manifest, o.common.out);
  log << "encoded " << records.size() << " samples, " << n_converged << " reached fidelity " << o.dis.fidelity << "\n";
  if (n_converged < records.size() && !o.allow_partial) return kExitNoConvergence;
  return kExitOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& log) {
  RunManifest manifest;
  manifest.command = "bench";
  manifest.stamp = o.common.stamp;
  manifest.started_at = iso_timestamp();
  manifest.seed = resolve_seed(o.common);
  manifest.config = {{"disentangle", disentangle_config_json(o.dis)},
                     {"width", o.width},
                     {"height", o.height},
                     {"limit", o.limit},
                     {"random", o.random},
                     {"qubits", o.qubits},
                     {"jobs", o.common.jobs}};

  Inputs in;
  if (o.random > 0) {
    if (!o.input.empty()) fail(ErrorCode::InvalidArgument, "give either --input or --random, not both");
    if (o.qubits < 2 || o.qubits > kDefaultStatevectorCap) fail(ErrorCode::InvalidArgument, "--qubits out of range");
    for (std::size_t i = 0; i < o.random; ++i) in.items.push_back({random_state(o.qubits, sample_seed(manifest.seed, 1, i))});
  } else {
    if (o.input.empty()) fail(ErrorCode::InvalidArgument, "bench needs --input or --random");
    in = load_inputs(o.input, o.width, o.height, o.limit);
  }
  manifest.inputs = in.files;
  for (const auto& item : in.items) (void)make_config(o.dis, item.state.n_qubits());

  struct Row {
    std::size_t n = 0, sweeps = 0, mps = 0, formula = 0;
    long built = -1;
    double fidelity = 0.0;
    bool converged = false;
  };
  std::vector<Row> rows(in.items.size());
  parallel_for(in.items.size(), o.common.jobs, [&](std::size_t i) {
    const Statevector& v = in.items[i].state;
    const DisentangleReport report = disentangle_partial(v, make_config(o.dis, v.n_qubits()));
    Row& r = rows[i];
    r.n = v.n_qubits();
    r.sweeps = report.layers.size();
    r.mps = cnot_count(preparation_program(report));
    r.formula = exact_prep_cnot_formula(r.n, has_imaginary_part(v));
    if (r.n <= kBaselineMaxQubits) r.built = static_cast<long>(cnot_count(exact_prep_baseline(v)));
    r.fidelity = report.achieved_fidelity;
    r.converged = report.converged;
  });

  std::ostringstream csv;
  csv << "index,label,n_qubits,sweeps,achieved_fidelity,converged,mps_cnots,baseline_formula_cnots,baseline_built_cnots\n";
  std::vector<double> mps, formula, built, sweeps;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> histogram;
  std::size_t n_converged = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv << i << ',' << in.items[i].label << ',' << r.n << ',' << r.sweeps << ',' << format_double(r.fidelity) << ','
        << (r.converged ? 1 : 0) << ',' << r.mps << ',' << r.formula << ',';
    if (r.built >= 0) csv << r.built;
    csv << '\n';
    mps.push_back(static_cast<double>(r.mps));
    formula.push_back(static_cast<double>(r.formula));
    sweeps.push_back(static_cast<double>(r.sweeps));
    ++histogram[r.mps].first;
    if (r.built >= 0) {
      built.push_back(static_cast<double>(r.built));
      ++histogram[static_cast<std::size_t>(r.built)].second;
    }
    n_converged += r.converged;
  }
  std::ostringstream hist;
  hist << "cnots,mps_samples,baseline_built_samples\n";
  for (const auto& [c, counts] : histogram) hist << c << ',' << counts.first << ',' << counts.second << '\n';

  nlohmann::json summary = {{"samples", rows.size()},
                            {"target_fidelity", o.dis.fidelity},
                            {"converged", n_converged},
                            {"median_sweeps", median(sweeps)},
                            {"max_sweeps", sweeps.empty() ? 0.0 : *std::max_element(sweeps.begin(), sweeps.end())},
                            {"median_mps_cnots", median(mps)},
                            {"mean_mps_cnots", mean(mps)},
                            {"median_baseline_formula_cnots", median(formula)},
                            {"ratio_to_formula", median(formula) > 0 ? median(mps) / median(formula) : 0.0}};
  if (!built.empty()) {
    summary["median_baseline_built_cnots"] = median(built);
    summary["ratio_to_built"] = median(built) > 0 ? median(mps) / median(built) : 0.0;
  }

  fs::create_directories(o.common.out);
  write_text(o.common.out / "bench.csv", csv.str());
  write_text(o.common.out / "bench_histogram.csv", hist.str());
  write_text(o.common.out / "bench_summary.json", summary.dump(2) + "\n");
  manifest.outputs = {o.common.out / "bench.csv", o.common.out / "bench_histogram.csv",
                      o.common.out / "bench_summary.json"};
  write_manifest(manifest, o.common.out);
  log << "median CNOTs: mps " << median(mps) << ", baseline formula " << median(formula) << "\n";
  return kExitOk;
}

int cmd_shapes(const ShapesOptions& o, std::ostream& log) {
  RunManifest manifest;
  manifest.command = "shapes";
  manifest.stamp = o.common.stamp;
  manifest.started_at = iso_timestamp();
  manifest.seed = resolve_seed(o.common);
  manifest.config = {{"train_per_class", o.train_per_class}, {"test_per_class", o.test_per_class}};
  if (o.train_per_class == 0 || o.test_per_class == 0) fail(ErrorCode::InvalidArgument, "per-class counts must be positive");

  const auto train = generate_shapes(o.train_per_class, manifest.seed);
  const auto test = generate_shapes(o.test_per_class, manifest.seed + 1);
  fs::create_directories(o.common.out);
  write_csv(o.common.out / "shapes_train.csv", train);
  write_csv(o.common.out / "shapes_test.csv", test);
  DatasetManifest dm{"shapes", 8, 8, {"horizontal", "vertical"}, {"shapes_train.csv", "shapes_test.csv"}};
  write_text(o.common.out / "shapes.json", manifest_json(dm).dump(2) + "\n");
  manifest.outputs = {o.common.out / "shapes_train.csv", o.common.out / "shapes_test.csv", o.common.out / "shapes.json"};
  write_manifest(manifest, o.common.out);
  log << "wrote " << train.size() << " training and " << test.size() << " test images\n";
  return kExitOk;
}

}  // namespace ampforge::cli
