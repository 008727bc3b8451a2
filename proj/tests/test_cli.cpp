#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <nlohmann/json.hpp>

#include "stub_judge.hpp"
#include "test_util.hpp"

namespace clear {
namespace {

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args, const testing::TempDir& dir) {
  auto out = dir / "stdout.txt";
  std::string cmd = std::string(CLEAR_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + (dir / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testing::read_file(out)};
}

std::string fixtures() { return "--pairs " + testing::data_path("fixture_pairs.jsonl"); }
std::string annotations() { return " --annotations " + testing::data_path("annotations"); }

TEST(Cli, UsageErrors) {
  testing::TempDir dir;
  EXPECT_EQ(run_cli("--help", dir).code, 0);
  EXPECT_EQ(run_cli("--version", dir).out, "0.1.0\n");
  EXPECT_EQ(run_cli("", dir).code, 1);
  EXPECT_EQ(run_cli("eval --bogus", dir).code, 1);
  EXPECT_EQ(run_cli("eval " + fixtures(), dir).code, 1);  // no --out
  EXPECT_EQ(run_cli("eval --pairs /nonexistent.jsonl --out x", dir).code, 1);
  EXPECT_EQ(run_cli("eval " + fixtures() + " --out x --levels vibes", dir).code, 1);
}

TEST(Cli, InputErrorsExitTwo) {
  testing::TempDir dir;
  testing::write_file(dir / "bad.jsonl", "{\"id\": 1}\n");
  EXPECT_EQ(run_cli("eval --pairs " + (dir / "bad.jsonl").string() + " --out " + (dir / "o").string(), dir).code, 2);
  EXPECT_NE(testing::read_file(dir / "stderr.txt").find("error:"), std::string::npos);
  EXPECT_EQ(run_cli("judge " + fixtures(), dir).code, 2);  // no judge URL
}

TEST(Cli, EvalWritesOutputsDeterministically) {
  testing::TempDir dir;
  auto a = dir / "a", b = dir / "b";
  ASSERT_EQ(run_cli("eval " + fixtures() + annotations() + " --out " + a.string() + " --dump-alignments", dir).code, 0);
  ASSERT_EQ(run_cli("eval " + fixtures() + annotations() + " --out " + b.string() + " --dump-alignments -j 4", dir).code,
            0);
  for (const char* f : {"report.json", "metrics.csv", "heatmap_lexical.csv", "heatmap_syntactic.csv",
                        "heatmap_semantic.csv", "heatmap_pragmatic.csv", "transformations.csv", "components.csv",
                        "correlations.csv", "alignments.json"}) {
    ASSERT_TRUE(std::filesystem::exists(a / f)) << f;
    EXPECT_EQ(testing::read_file(a / f), testing::read_file(b / f)) << f;
  }
  auto report = nlohmann::json::parse(testing::read_file(a / "report.json"));
  EXPECT_EQ(report["provenance"]["dataset"], "fixture_pairs");
  EXPECT_EQ(report["pairs"].size(), 5u);
  auto al = nlohmann::json::parse(testing::read_file(a / "alignments.json"));
  EXPECT_EQ(al["p1"]["backend"], "embedding");
}

TEST(Cli, ConfigFile) {
  testing::TempDir dir;
  testing::write_file(dir / "run.toml", "[eval]\npairs = \"" + testing::data_path("fixture_pairs.jsonl") + "\"\nout = \"" +
                                            (dir / "o").string() + "\"\nlevels = [\"lexical\"]\ndataset = \"cfg\"\n");
  ASSERT_EQ(run_cli("--config " + (dir / "run.toml").string() + " eval", dir).code, 0);
  auto report = nlohmann::json::parse(testing::read_file(dir / "o" / "report.json"));
  EXPECT_EQ(report["provenance"]["dataset"], "cfg");
  EXPECT_EQ(report["provenance"]["levels"], nlohmann::json::array({"lexical"}));
  EXPECT_FALSE(std::filesystem::exists(dir / "o" / "heatmap_syntactic.csv"));
}

TEST(Cli, JudgeThroughStub) {
  testing::StubJudge stub(testing::StubJudge::deterministic);
  testing::TempDir dir;
  ::setenv("CLEAR_JUDGE_API_KEY", "k123", 1);
  auto r = run_cli("eval " + fixtures() + " --levels pragmatic --out " + (dir / "o").string() + " --judge-url " +
                       stub.url() + " --judge-model m",
                   dir);
  ::unsetenv("CLEAR_JUDGE_API_KEY");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(stub.bodies().size(), 20u);
  EXPECT_EQ(stub.auth_headers()[0], "Bearer k123");
  auto report = nlohmann::json::parse(testing::read_file(dir / "o" / "report.json"));
  const auto& coh = report["pairs"][0]["pragmatic"]["metrics"]["coherence"];
  EXPECT_TRUE(coh["original"].is_number());
  // The key is not part of the recorded configuration.
  EXPECT_EQ(testing::read_file(dir / "o" / "report.json").find("k123"), std::string::npos);

  auto j = run_cli("judge " + fixtures() + " --judge-url " + stub.url(), dir);
  ASSERT_EQ(j.code, 0);
  EXPECT_EQ(nlohmann::json::parse(j.out).size(), 20u);
}

TEST(Cli, UnreachableJudgeExitsThree) {
  testing::TempDir dir;
  auto args = fixtures() + " --judge-url http://127.0.0.1:1/v1 --judge-retries 0";
  EXPECT_EQ(run_cli("eval " + args + " --levels pragmatic --out " + (dir / "o").string(), dir).code, 3);
  EXPECT_EQ(run_cli("judge " + args, dir).code, 3);
}

TEST(Cli, AlignStatsAndBias) {
  testing::TempDir dir;
  auto al = run_cli("align " + fixtures(), dir);
  ASSERT_EQ(al.code, 0);
  auto j = nlohmann::json::parse(al.out);
  EXPECT_EQ(j["p2"]["counts"]["split"], 1);
  EXPECT_EQ(j["p2"]["backend"], "trigram");

  auto st = run_cli("stats " + fixtures(), dir);
  ASSERT_EQ(st.code, 0);
  EXPECT_EQ(nlohmann::json::parse(st.out)["original"]["doc_count"], 5);

  ASSERT_EQ(run_cli("eval " + fixtures() + " --dataset one --out " + (dir / "a").string(), dir).code, 0);
  ASSERT_EQ(run_cli("eval " + fixtures() + annotations() + " --dataset two --out " + (dir / "b").string(), dir).code, 0);
  ASSERT_EQ(run_cli("bias --report " + (dir / "a" / "report.json").string() + " --report " +
                        (dir / "b" / "report.json").string() + " --out " + (dir / "h").string(),
                    dir)
                .code,
            0);
  auto heat = testing::read_file(dir / "h" / "heatmap_lexical.csv");
  EXPECT_NE(heat.find("\none,"), std::string::npos);
  EXPECT_NE(heat.find("\ntwo,"), std::string::npos);
  auto comp = testing::read_file(dir / "h" / "components.csv");
  EXPECT_EQ(comp.substr(0, comp.find('\n')), "component,one,two");
  EXPECT_TRUE(std::filesystem::exists(dir / "h" / "correlations_two.csv"));

  testing::write_file(dir / "junk.json", "[]");
  EXPECT_EQ(run_cli("bias --report " + (dir / "junk.json").string() + " --out " + (dir / "h2").string(), dir).code, 2);
}

}  // namespace
}  // namespace clear
