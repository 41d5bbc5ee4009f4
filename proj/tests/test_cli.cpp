#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("difflab-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    ASSERT_EQ(run("graph --kind pa --n 200 --density 2 --seed 3 -o " + path("g.txt")), 0);
    // Links out of 2 and 3 never see a cascade.
    spit(path("small.txt"), "0 1\n1 0\n2 3\n3 2\n");
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  /// Exit status of the CLI; stdout and stderr go to files in the scratch dir.
  static int run(const std::string& args) {
    const std::string cmd = std::string(DIFFLAB_CLI_PATH) + " " + args + " >" + path("stdout.txt") +
                            " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static json manifest(const std::string& out) { return json::parse(slurp(path(out) + ".manifest.json")); }

  static inline fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run("simulate --graph " + path("g.txt") + " -o " + path("x.jsonl")), 2);
  EXPECT_EQ(run("simulate --graph " + path("g.txt") + " --model asic --q 0.5 --r 1 -o " + path("x.jsonl")), 2);
  EXPECT_EQ(run("simulate --graph " + path("g.txt") + " --model asic --p 0.5 -o " + path("x.jsonl")), 2);
  EXPECT_EQ(run("rank --graph " + path("g.txt") + " --method eigen -o " + path("x.csv")), 2);
  EXPECT_EQ(run("rank --graph " + path("g.txt") + " --method pagerank --model asic --p 0.1 --r 1 -o " +
                path("x.csv")),
            2);
  EXPECT_EQ(run("graph --kind pa --n 1 -o " + path("x.txt")), 2);
  EXPECT_EQ(run("learn --graph " + path("missing.txt") + " --cascades x --model asic -o " + path("x.json")), 2);
  spit(path("bad.jsonl"), "{oops\n");
  EXPECT_EQ(run("learn --graph " + path("g.txt") + " --cascades " + path("bad.jsonl") + " --model asic -o " +
                path("x.json")),
            2);
  EXPECT_NE(slurp(path("stderr.txt")).find("line 1"), std::string::npos);
}

TEST_F(Cli, SimulateReachesTargetAndIsDeterministic) {
  const std::string base = "simulate --graph " + path("g.txt") +
                           " --model asic --p 0.2 --r 1 --target-active 300 --min-len 10 --seed 5 -o ";
  ASSERT_EQ(run(base + path("a.jsonl")), 0);
  ASSERT_EQ(run(base + path("b.jsonl")), 0);
  const std::string a = slurp(path("a.jsonl"));
  EXPECT_EQ(a, slurp(path("b.jsonl")));
  std::size_t total = 0;
  std::istringstream lines(a);
  for (std::string line; std::getline(lines, line);) {
    const auto c = json::parse(line);
    EXPECT_GE(c["events"].size(), 10u);
    total += c["events"].size();
  }
  EXPECT_GE(total, 300u);

  auto ma = manifest("a.jsonl"), mb = manifest("b.jsonl");
  EXPECT_EQ(ma["command"], "simulate");
  EXPECT_EQ(ma["seed"], 5);
  EXPECT_EQ(ma["config"]["target_active"], 300);
  EXPECT_EQ(ma["inputs"]["graph"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_TRUE(ma.contains("version"));
  EXPECT_TRUE(ma.contains("duration_seconds"));
  ma.erase("duration_seconds");
  mb.erase("duration_seconds");
  ma["config"].erase("out");
  mb["config"].erase("out");
  EXPECT_EQ(ma, mb);
}

TEST_F(Cli, SimulationFailureExitsThree) {
  EXPECT_EQ(run("simulate --graph " + path("g.txt") +
                " --model asic --p 0 --r 1 --min-len 2 --target-active 10 --max-attempts 200 -o " +
                path("fail.jsonl")),
            3);
}

TEST_F(Cli, LearnWritesParamsTraceAndManifest) {
  ASSERT_EQ(run("simulate --graph " + path("g.txt") +
                " --model aslt --q 0.9 --r 1 --target-active 500 --min-len 5 --seed 7 -o " + path("lt.jsonl")),
            0);
  spit(path("truth.json"), R"({"model":"aslt","mode":"shared","q":0.9,"r":1.0})");
  ASSERT_EQ(run("learn --graph " + path("g.txt") + " --cascades " + path("lt.jsonl") +
                " --model aslt --truth " + path("truth.json") + " -o " + path("lt.json")),
            0);
  const auto params = json::parse(slurp(path("lt.json")));
  EXPECT_EQ(params["model"], "aslt");
  EXPECT_EQ(params["mode"], "shared");
  const auto trace = json::parse(slurp(path("lt.json") + ".trace.json"));
  EXPECT_GE(trace["loglik"].size(), 2u);
  EXPECT_LT(trace["errors"]["q"].get<double>(), 0.2);
  EXPECT_LT(trace["errors"]["r"].get<double>(), 0.2);
  const auto m = manifest("lt.json");
  EXPECT_EQ(m["config"]["tol"], 1e-6);
  EXPECT_EQ(m["config"]["max_iter"], 100);
  EXPECT_EQ(m["warnings"], 0);
  EXPECT_TRUE(m["inputs"].contains("cascades"));
  EXPECT_TRUE(m["inputs"].contains("truth"));
}

TEST_F(Cli, PerLinkLearningCountsUntouchedLinks) {
  spit(path("small.jsonl"), R"({"id":"a","events":[[0,0],[1,0.5]],"horizon":3})" "\n");
  ASSERT_EQ(run("learn --graph " + path("small.txt") + " --cascades " + path("small.jsonl") +
                " --model asic --mode per-link -o " + path("small.json")),
            0);
  EXPECT_GT(manifest("small.json")["warnings"].get<int>(), 0);
  EXPECT_NE(slurp(path("stderr.txt")).find("warning"), std::string::npos);
}

TEST_F(Cli, EstimationFailureExitsFour) {
  // Node 3 activates with no earlier active parent.
  spit(path("orphan.jsonl"), R"({"id":"a","events":[[0,0],[3,1]],"horizon":2})" "\n");
  EXPECT_EQ(run("learn --graph " + path("small.txt") + " --cascades " + path("orphan.jsonl") +
                " --model asic -o " + path("orphan.json")),
            4);
  spit(path("empty.jsonl"), "\n");
  spit(path("small.jsonl"), R"({"id":"a","events":[[0,0],[1,0.5]],"horizon":3})" "\n");
  EXPECT_EQ(run("learn --graph " + path("small.txt") + " --cascades " + path("empty.jsonl") +
                " --model asic -o " + path("empty.json")),
            4);
  EXPECT_EQ(run("learn --graph " + path("small.txt") + " --cascades " + path("small.jsonl") +
                " --model asic --delay node-ov -o " + path("nodefit.json")),
            2);
}

TEST_F(Cli, SelectSkipsThinTopicsAndFlagsTies) {
  // Chain 0 -> 1 with isolated 2: the held-out activation of 2 is impossible
  // under both models, so both scores are infinite.
  spit(path("chain.txt"), "0 1\n1 0\n2 2000\n");
  spit(path("sel.jsonl"),
       R"({"id":"a","events":[[0,0],[1,1],[2,2]],"horizon":3})" "\n"
       R"({"id":"b","events":[[0,0]],"horizon":3})" "\n");
  spit(path("topics.csv"), "id,topic\na,tie\nb,thin\n");
  ASSERT_EQ(run("select --graph " + path("chain.txt") + " --cascades " + path("sel.jsonl") +
                " --topic-labels " + path("topics.csv") + " -o " + path("sel.json")),
            0);
  const auto reports = json::parse(slurp(path("sel.json")));
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0]["topic"], "tie");
  EXPECT_EQ(reports[0]["indeterminate"], true);
  EXPECT_EQ(reports[0]["chosen"], "asic");
  EXPECT_EQ(reports[1]["topic"], "thin");
  EXPECT_EQ(reports[1]["skipped"], true);
  EXPECT_FALSE(reports[1]["reason"].get<std::string>().empty());
}

TEST_F(Cli, RankingPipeline) {
  ASSERT_EQ(run("influence --graph " + path("g.txt") + " --model asic --p 0.1 --r 1 --samples 300 --seed 2 -o " +
                path("inf.csv")),
            0);
  EXPECT_EQ(manifest("inf.csv")["config"]["samples"], 300);
  ASSERT_EQ(run("influence --graph " + path("g.txt") + " --model asic --p 0.1 --r 1 -o " + path("inf_default.csv")),
            0);
  EXPECT_EQ(manifest("inf_default.csv")["config"]["samples"], 10000);
  ASSERT_EQ(run("rank --graph " + path("g.txt") + " --method pagerank -o " + path("pr.csv")), 0);
  ASSERT_EQ(run("compare-rank --graph " + path("g.txt") + " --truth " + path("inf.csv") + " --candidate " +
                path("pr.csv") + " --k 200 -o " + path("cmp.csv")),
            0);
  std::istringstream rows(slurp(path("cmp.csv")));
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "k,similarity");
  int count = 0;
  while (std::getline(rows, line)) ++count;
  EXPECT_EQ(count, 200);

  ASSERT_EQ(run("compare-rank --graph " + path("g.txt") + " --truth " + path("inf.csv") + " --candidate " +
                path("inf.csv") + " --k 50 -o " + path("self.csv")),
            0);
  std::istringstream self(slurp(path("self.csv")));
  std::getline(self, line);
  while (std::getline(self, line)) EXPECT_EQ(line.substr(line.find(',') + 1), "1");
  EXPECT_EQ(run("compare-rank --graph " + path("g.txt") + " --truth " + path("inf.csv") + " --candidate " +
                path("pr.csv") + " --k 201 -o " + path("cmp.csv")),
            2);
}
