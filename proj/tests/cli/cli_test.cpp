#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ampforge/circuit.hpp"
#include "ampforge/simulator.hpp"
#include "cli.hpp"
#include "common.hpp"

namespace fs = std::filesystem;
using ampforge::cli::run;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ampforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int ampforge(std::vector<std::string> args) {
    args.insert(args.begin(), "ampforge");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  }

  void write_ghz(const std::string& name, std::size_t n) {
    nlohmann::json amps = nlohmann::json::array();
    const double a = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) {
      const bool end = i == 0 || i + 1 == (std::size_t{1} << n);
      amps.push_back({end ? a : 0.0, 0.0});
    }
    std::ofstream(path(name)) << nlohmann::json::array({{{"label", 0}, {"amplitudes", amps}}}).dump();
  }

  std::vector<nlohmann::json> jsonl(const std::string& p) {
    std::vector<nlohmann::json> rows;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) rows.push_back(nlohmann::json::parse(line));
    return rows;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, GhzNeedsOneSweep) {
  write_ghz("ghz.json", 6);
  ASSERT_EQ(ampforge({"encode", "--input", path("ghz.json"), "--fidelity", "0.99", "--out", path("o")}), 0)
      << err_.str();
  const auto rows = jsonl(path("o/encode.jsonl"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["sweeps"], 1);
  EXPECT_GE(rows[0]["achieved_fidelity"].get<double>(), 0.99);
}

TEST_F(CliTest, EmptyInputExitsTwo) {
  std::ofstream(path("empty.csv")).close();
  EXPECT_EQ(ampforge({"encode", "--input", path("empty.csv"), "--width", "8", "--height", "8", "--out", path("o")}), 2);
}

TEST_F(CliTest, MalformedInputExitsTwo) {
  std::ofstream(path("bad.csv")) << "0,1,2,x\n";
  EXPECT_EQ(ampforge({"encode", "--input", path("bad.csv"), "--width", "1", "--height", "3", "--out", path("o")}), 2);
  std::ofstream(path("bad.json")) << "[{\"amplitudes\": [[1, 0], [0, 0], [0";
  EXPECT_EQ(ampforge({"encode", "--input", path("bad.json"), "--out", path("o")}), 2);
  EXPECT_EQ(ampforge({"encode", "--input", path("missing.csv"), "--width", "2", "--height", "2"}), 2);
  EXPECT_EQ(ampforge({"encode", "--bogus"}), 2);
  EXPECT_EQ(ampforge({}), 2);
}

TEST_F(CliTest, FidelityOutsideUnitIntervalExitsTwo) {
  write_ghz("ghz.json", 3);
  EXPECT_EQ(ampforge({"encode", "--input", path("ghz.json"), "--fidelity", "0", "--out", path("o")}), 2);
  EXPECT_EQ(ampforge({"encode", "--input", path("ghz.json"), "--fidelity", "1.01", "--out", path("o")}), 2);
  EXPECT_EQ(ampforge({"train", "--dataset", path("none.json"), "--encoding", "mps:2"}), 2);
}

TEST_F(CliTest, NonConvergenceExitsThreeUnlessPartialAllowed) {
  // Highly entangled 6-qubit state; one sweep gets nowhere near 0.999.
  nlohmann::json amps = nlohmann::json::array();
  for (int i = 0; i < 64; ++i) amps.push_back({std::sin(1.7 * i + 0.3), std::cos(2.9 * i)});
  std::ofstream(path("s.json")) << nlohmann::json::array({{{"amplitudes", amps}}}).dump();
  const std::vector<std::string> base = {"encode", "--input", path("s.json"), "--fidelity", "0.999", "--max-sweeps", "1",
                                         "--out", path("o")};
  EXPECT_EQ(ampforge(base), 3);
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  auto partial = base;
  partial.push_back("--allow-partial");
  EXPECT_EQ(ampforge(partial), 0);
  EXPECT_FALSE(jsonl(path("o/encode.jsonl"))[0]["converged"].get<bool>());
}

TEST_F(CliTest, QasmOutputPreparesTheReportedState) {
  write_ghz("ghz.json", 4);
  ASSERT_EQ(ampforge({"encode", "--input", path("ghz.json"), "--fidelity", "1", "--qasm-out", path("q"), "--baseline",
                      "--out", path("o")}),
            0);
  const auto rows = jsonl(path("o/encode.jsonl"));
  const ampforge::Circuit c = ampforge::parse_qasm(slurp(path("q/sample_00000.qasm")));
  EXPECT_EQ(ampforge::cnot_count(c), rows[0]["cnot_count"].get<std::size_t>());
  const auto amps = ampforge::run(c).amplitudes();
  EXPECT_NEAR(std::norm(amps.front()) + std::norm(amps.back()), 1.0, 1e-10);
  EXPECT_TRUE(rows[0].contains("baseline_cnot_count"));
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
  ASSERT_EQ(setenv("AMP_FORGE_SEED", "17", 1), 0);
  ASSERT_EQ(ampforge({"bench", "--random", "3", "--out", path("env")}), 0);
  unsetenv("AMP_FORGE_SEED");
  ASSERT_EQ(ampforge({"bench", "--random", "3", "--seed", "17", "--out", path("flag")}), 0);
  ASSERT_EQ(ampforge({"bench", "--random", "3", "--seed", "18", "--out", path("other")}), 0);
  EXPECT_EQ(slurp(path("env/bench.csv")), slurp(path("flag/bench.csv")));
  EXPECT_NE(slurp(path("other/bench.csv")), slurp(path("flag/bench.csv")));
  EXPECT_EQ(nlohmann::json::parse(slurp(path("env/manifest.json")))["seed"], 17);
}

TEST_F(CliTest, ManifestRecordsGitBlobHashOfInputs) {
  std::ofstream(path("hello.txt")) << "hello\n";
  // `git hash-object` of "hello\n".
  EXPECT_EQ(ampforge::cli::git_blob_hash(path("hello.txt")), "ce013625030ba8dba906f756967f9e9ca394464a");
  ASSERT_EQ(ampforge({"shapes", "--train-per-class", "2", "--test-per-class", "2", "--out", path("ds")}), 0);
  ASSERT_EQ(ampforge({"encode", "--input", path("ds/shapes.json"), "--out", path("o")}), 0);
  const auto m = nlohmann::json::parse(slurp(path("o/manifest.json")));
  EXPECT_EQ(m["command"], "encode");
  EXPECT_EQ(m["schema_version"], 1);
  EXPECT_FALSE(m.contains("timestamps"));
  ASSERT_EQ(m["inputs"].size(), 2u);
  EXPECT_EQ(m["inputs"][0]["git_blob"], ampforge::cli::git_blob_hash(path("ds/shapes_train.csv")));
  ASSERT_EQ(ampforge({"encode", "--input", path("ds/shapes.json"), "--stamp", "--out", path("o")}), 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(path("o/manifest.json"))).contains("timestamps"));
}

TEST_F(CliTest, JobsDoNotChangeOutputs) {
  ASSERT_EQ(ampforge({"bench", "--random", "6", "--seed", "5", "--jobs", "1", "--out", path("j1")}), 0);
  ASSERT_EQ(ampforge({"bench", "--random", "6", "--seed", "5", "--jobs", "3", "--out", path("j3")}), 0);
  EXPECT_EQ(slurp(path("j1/bench.csv")), slurp(path("j3/bench.csv")));
}

TEST_F(CliTest, BenchOnChiTwoStatesCountsOneStaircaseSweep) {
  // GHZ has bond dimension 2, so one staircase sweep of N-1 two-qubit blocks is exact.
  write_ghz("ghz.json", 5);
  ASSERT_EQ(ampforge({"bench", "--input", path("ghz.json"), "--fidelity", "1", "--max-sweeps", "1000", "--out",
                      path("b")}),
            0);
  const auto summary = nlohmann::json::parse(slurp(path("b/bench_summary.json")));
  EXPECT_EQ(summary["max_sweeps"], 1.0);
  EXPECT_LE(summary["median_mps_cnots"].get<double>(), 3.0 * (5 - 1));
}

TEST_F(CliTest, TrainAndAttackWriteTheirArtifacts) {
  ASSERT_EQ(ampforge({"shapes", "--train-per-class", "4", "--test-per-class", "4", "--out", path("ds")}), 0);
  const std::string ds = path("ds/shapes.json");
  ASSERT_EQ(ampforge({"train", "--dataset", ds, "--epochs", "1", "--perturb-curve", "1,0.5", "--out", path("t")}), 0)
      << err_.str();
  for (const char* f : {"checkpoint.json", "history.csv", "perturb_curve.csv", "summary.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(path("t/") + f)) << f;
  }
  EXPECT_EQ(slurp(path("t/perturb_curve.csv")).substr(0, 22), "fidelity,accuracy,loss");
  ASSERT_EQ(ampforge({"train-surrogate", "--dataset", ds, "--epochs", "5", "--out", path("s")}), 0);
  ASSERT_EQ(ampforge({"attack", "--dataset", ds, "--surrogate", path("s/surrogate.json"), "--qvc",
                      "q=" + path("t/checkpoint.json"), "--strengths", "0,0.1", "--out", path("a")}),
            0)
      << err_.str();
  const auto report = nlohmann::json::parse(slurp(path("a/attack.json")));
  EXPECT_EQ(report["rows"].size(), 4u);
  EXPECT_EQ(report["surrogate"]["architecture"], "dense-mlp");
  EXPECT_EQ(ampforge({"attack", "--dataset", ds, "--surrogate", path("s/surrogate.json"), "--qvc", "no-equals-sign"}), 2);
}

}  // namespace
