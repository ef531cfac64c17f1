#include "exactnn/dataset.hpp"
#include "exactnn/model_io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

using namespace exactnn;
namespace fs = std::filesystem;

const fs::path kSource = EXACTNN_SOURCE_DIR;

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "exactnn_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + EXACTNN_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string model(const char* name) { return (kSource / "models" / name).string(); }
std::string spec(const char* name) { return (kSource / "specs" / name).string(); }

TEST(Cli, RunPrintsDecimalStrings) {
  const fs::path x = scratch() / "x.json";
  std::ofstream(x) << R"({"values":["60000","0","0","1200","0"]})";
  const Outcome o = cli("run --model " + model("acas_clamped.json") + " --input " + x.string());
  ASSERT_EQ(o.code, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["output"][0], "1000");
}

TEST(Cli, ReachExitCodesFollowStatus) {
  const Outcome proved = cli("verify reach --model " + model("acas_clamped.json") + " --spec " +
                             spec("acas_phi1.json") + " --timeout-ms 300000");
  EXPECT_EQ(proved.code, 0) << proved.err;
  EXPECT_EQ(Json::parse(proved.out)["status"], "proved");
  const Outcome refuted =
      cli("verify reach --model " + model("acas_identity.json") + " --spec " + spec("acas_phi1.json"));
  EXPECT_EQ(refuted.code, 1) << refuted.err;
  const Json j = Json::parse(refuted.out);
  EXPECT_EQ(j["status"], "refuted");
  EXPECT_GT(parse_rational(j["witness"][0].get<std::string>()), 1500);
  EXPECT_FALSE(refuted.err.empty());
}

TEST(Cli, TimeoutExitCode) {
  // |x| needs a split; a zero budget stops before any leaf is decided.
  const fs::path m = scratch() / "abs.json";
  std::ofstream(m) << R"({"format_version":1,"dtype":"rational","input_shape":[1],"layers":[
    {"type":"fc","activation":"relu","weights":[["0","1"],["0","-1"]]},
    {"type":"fc","activation":"linear","weights":[["0","1","1"]]}]})";
  const fs::path s = scratch() / "abs_spec.json";
  std::ofstream(s) << R"({"format_version":1,"kind":"reach","inputs":[{"name":"x","lower":"-1","upper":"1"}],
    "output":{"coefficients":["1"],"comparator":"<=","threshold":"1"}})";
  EXPECT_EQ(cli("verify reach --model " + m.string() + " --spec " + s.string() + " --timeout-ms 0").code, 2);
  EXPECT_EQ(cli("verify reach --model " + m.string() + " --spec " + s.string()).code, 0);
}

TEST(Cli, DeterministicOutputIsByteIdentical) {
  const std::string args = "verify reach --model " + model("acas_identity.json") + " --spec " +
                           spec("acas_phi1.json") + " --deterministic";
  const Outcome a = cli(args);
  const Outcome b = cli(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(Json::parse(a.out)["stats"]["elapsed_ms"], 0);
  const std::string lemma = "lemma extreme-values --case r2 --dim 4 --budget 200 --seed 9";
  EXPECT_EQ(cli(lemma).out, cli(lemma).out);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 64);
  EXPECT_EQ(cli("frobnicate").code, 64);
  EXPECT_EQ(cli("run --model a.json --input b.json --bogus").code, 64);
  EXPECT_EQ(cli("verify robustness --model " + model("toy_cnn_diagonal.json") + " --input x.json --method magic").code,
            64);
  EXPECT_EQ(cli("lemma extreme-values --case r3").code, 64);
}

TEST(Cli, DataErrors) {
  EXPECT_EQ(cli("run --model " + (scratch() / "missing.json").string() + " --input x.json").code, 65);
  const fs::path bad = scratch() / "bad.json";
  std::ofstream(bad) << R"({"format_version":1,"dtype":"rational","input_shape":[1],"layers":[{"type":"fc","activation":"relu","weights":[["0","x"]]}]})";
  const Outcome o = cli("run --model " + bad.string() + " --input x.json");
  EXPECT_EQ(o.code, 65);
  EXPECT_NE(o.err.find("layers[0].weights[0][1]"), std::string::npos) << o.err;
  const fs::path x = scratch() / "short.json";
  std::ofstream(x) << R"(["1"])";
  EXPECT_EQ(cli("run --model " + model("acas_clamped.json") + " --input " + x.string()).code, 65);
}

TEST(Cli, DatasetGenAndRobustness) {
  const fs::path d = scratch() / "faces";
  const Outcome o = cli("dataset gen --seed 0 --count 144 -o " + d.string());
  ASSERT_EQ(o.code, 0) << o.err;
  const auto m = dataset::read_dataset(d);
  EXPECT_EQ(m.images.size(), 144u);
  const fs::path first = d / "img_0000.pgm";
  ASSERT_TRUE(fs::exists(first)) << first;

  for (const char* method : {"brute", "bab"}) {
    const Outcome r = cli("verify robustness --model " + model("toy_cnn_diagonal.json") + " --input " + first.string() +
                          " --spec " + spec("toy_sr.json") + " --method " + method + " --deterministic");
    EXPECT_TRUE(r.code == 0 || r.code == 1) << r.err;
    EXPECT_TRUE(Json::parse(r.out).contains("status"));
  }
  const Outcome e = cli("explain --model " + model("toy_cnn_diagonal.json") + " --dataset " + d.string());
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(Json::parse(e.out)["images"]["happy"], 72);
}

TEST(Cli, QuantizeAndPrune) {
  const fs::path q = scratch() / "q.json";
  ASSERT_EQ(cli("quantize --model " + model("toy_cnn_diagonal.json") + " --scale-bits 4 -o " + q.string()).code, 0);
  const Model loaded = load_model(q);
  EXPECT_TRUE(loaded.is_int());
  EXPECT_EQ(loaded.scale_bits, 4);
  const fs::path p = scratch() / "p.json";
  ASSERT_EQ(cli("prune --model " + model("toy_cnn_diagonal.json") + " --density 0.1 -o " + p.string()).code, 0);
  const auto counts = fc_weight_counts(load_model(p).rational());
  EXPECT_EQ(counts.second, counts.first / 10);
  EXPECT_EQ(cli("prune --model " + model("toy_cnn_diagonal.json") + " --density 2").code, 65);
}

TEST(Cli, LemmaCommands) {
  const Outcome mono = cli("lemma monotonicity --trials 100 --seed 1");
  ASSERT_EQ(mono.code, 0) << mono.err;
  EXPECT_EQ(Json::parse(mono.out)["violations"], 0);
  const Outcome r1 = cli("lemma extreme-values --case r1 --dim 4 --budget 20");
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(Json::parse(r1.out)["violations"], 0);
}

}  // namespace
