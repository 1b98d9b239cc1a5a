#include "cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "ampforge/disentangler.hpp"
#include "ampforge/error.hpp"
#include "commands.hpp"

namespace ampforge::cli {

namespace {

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--seed", c.seed, "RNG seed (default: $AMP_FORGE_SEED, else 0)");
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_flag("--stamp", c.stamp, "record wall-clock timestamps in manifest.json");
}

void add_disentangle(CLI::App* cmd, DisentangleOptions& d) {
  cmd->add_option("--fidelity", d.fidelity, "target fidelity in (0, 1]");
  cmd->add_option("--k", d.k, "window size (qubits per unitary)");
  cmd->add_option("--layout", d.layout, "staircase or disjoint")->check(CLI::IsMember({"staircase", "disjoint"}));
  cmd->add_option("--max-sweeps", d.max_sweeps, "sweep limit");
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::EmptyBatch:
    case ErrorCode::InvalidArgument:
    case ErrorCode::AllZeroInput:
    case ErrorCode::DimensionMismatch:
      return kExitBadInput;
    case ErrorCode::DidNotConverge:
      return kExitNoConvergence;
    default:
      return kExitFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ampforge: approximate amplitude encoding with MPS disentanglers", "ampforge"};
  app.require_subcommand(1);

  EncodeOptions enc;
  auto* encode = app.add_subcommand("encode", "disentangle inputs and report fidelity, sweeps and CNOTs as JSON lines");
  encode->add_option("--input", enc.input, "CSV, dataset manifest or JSON state file")->required();
  encode->add_option("--width", enc.width, "image width for CSV input");
  encode->add_option("--height", enc.height, "image height for CSV input");
  encode->add_option("--limit", enc.limit, "use the first N samples");
  add_disentangle(encode, enc.dis);
  encode->add_option("--qasm-out", enc.qasm_out, "write one OpenQASM 2.0 file per sample here");
  encode->add_option("--pgm-out", enc.pgm_out, "write input and prepared images as PGM here");
  encode->add_flag("--dump-mps", enc.dump_mps, "include MPS bond dimensions and site norms");
  encode->add_flag("--baseline", enc.baseline, "also count CNOTs of the exact baseline (N <= 6)");
  encode->add_flag("--allow-partial", enc.allow_partial, "exit 0 even if the target fidelity is not reached");
  add_common(encode, enc.common);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "CNOT counts of the MPS method against the exact baseline");
  bench_cmd->add_option("--input", bench.input, "CSV, dataset manifest or JSON state file");
  bench_cmd->add_option("--width", bench.width, "image width for CSV input");
  bench_cmd->add_option("--height", bench.height, "image height for CSV input");
  bench_cmd->add_option("--limit", bench.limit, "use the first N samples");
  bench_cmd->add_option("--random", bench.random, "benchmark N Haar-random states instead of a corpus");
  bench_cmd->add_option("--qubits", bench.qubits, "qubits per random state");
  add_disentangle(bench_cmd, bench.dis);
  add_common(bench_cmd, bench.common);

  ShapesOptions shapes;
  auto* shapes_cmd = app.add_subcommand("shapes", "generate the 8x8 bar dataset (train + test CSV and manifest)");
  shapes_cmd->add_option("--train-per-class", shapes.train_per_class);
  shapes_cmd->add_option("--test-per-class", shapes.test_per_class);
  add_common(shapes_cmd, shapes.common);

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "train a variational classifier on encoded images");
  train_cmd->add_option("--dataset", tr.manifest, "dataset manifest listing train and test CSV")->required();
  train_cmd->add_option("--encoding", tr.encoding, "exact, mps:F or perturb:F");
  train_cmd->add_option("--layers", tr.layers)->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", tr.epochs);
  train_cmd->add_option("--lr", tr.learning_rate);
  train_cmd->add_option("--batch-size", tr.batch_size)->check(CLI::PositiveNumber);
  train_cmd->add_option("--readout", tr.readout, "readout qubit for two classes");
  train_cmd->add_option("--classes", tr.classes, "keep only these labels, relabelled in order")->delimiter(',');
  train_cmd->add_option("--perturb-curve", tr.perturb_curve, "comma list of fidelities; evaluates on perturbed test inputs");
  train_cmd->add_option("--limit-train", tr.limit_train);
  train_cmd->add_option("--limit-test", tr.limit_test);
  add_common(train_cmd, tr.common);

  SurrogateOptions sur;
  auto* sur_cmd = app.add_subcommand("train-surrogate", "train the classical MLP used to craft attacks");
  sur_cmd->add_option("--dataset", sur.manifest, "dataset manifest listing train and test CSV")->required();
  sur_cmd->add_option("--epochs", sur.epochs);
  sur_cmd->add_option("--lr", sur.learning_rate);
  sur_cmd->add_option("--hidden", sur.hidden)->check(CLI::PositiveNumber);
  sur_cmd->add_option("--classes", sur.classes)->delimiter(',');
  sur_cmd->add_option("--limit-train", sur.limit_train);
  sur_cmd->add_option("--limit-test", sur.limit_test);
  add_common(sur_cmd, sur.common);

  AttackOptions att;
  auto* att_cmd = app.add_subcommand("attack", "transfer PGD attacks from the surrogate to QVC checkpoints");
  att_cmd->add_option("--dataset", att.manifest, "dataset manifest listing train and test CSV")->required();
  att_cmd->add_option("--surrogate", att.surrogate, "surrogate.json from train-surrogate")->required();
  att_cmd->add_option("--qvc", att.qvcs, "name=checkpoint.json (repeatable)");
  att_cmd->add_option("--strengths", att.strengths, "comma list of attack strengths");
  att_cmd->add_option("--classes", att.classes)->delimiter(',');
  att_cmd->add_option("--limit-test", att.limit_test);
  add_common(att_cmd, att.common);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  try {
    if (*encode) return cmd_encode(enc, err);
    if (*bench_cmd) return cmd_bench(bench, err);
    if (*shapes_cmd) return cmd_shapes(shapes, err);
    if (*train_cmd) return cmd_train(tr, err);
    if (*sur_cmd) return cmd_train_surrogate(sur, err);
    if (*att_cmd) return cmd_attack(att, err);
  } catch (const DidNotConverge& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace ampforge::cli
