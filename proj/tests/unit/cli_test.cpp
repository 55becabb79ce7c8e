#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "agentslice/cli.hpp"
#include "agentslice/eval.hpp"
#include "agentslice/slice.hpp"
#include "support/helpers.hpp"

namespace agentslice::testing {
namespace {

using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Unsets the API key for the lifetime of the guard.
class NoApiKey {
 public:
  NoApiKey() {
    if (const char* v = std::getenv("SLICEMATE_API_KEY")) saved_ = v;
    ::unsetenv("SLICEMATE_API_KEY");
  }
  ~NoApiKey() {
    if (!saved_.empty()) ::setenv("SLICEMATE_API_KEY", saved_.c_str(), 1);
  }

 private:
  std::string saved_;
};

std::string top3() { return (fixture_dir() / "top_three").string(); }

TEST(Cli, HelpListsCommandsAndFlags) {
  auto top = cli({"--help"});
  EXPECT_EQ(top.code, kExitOk);
  for (auto word : {"slice", "eval", "cassette"}) EXPECT_NE(top.out.find(word), std::string::npos) << word;
  auto slice = cli({"slice", "--help"});
  EXPECT_EQ(slice.code, kExitOk);
  for (auto flag : {"--workspace", "--criterion", "--out", "--transcript", "--replay", "--record", "--max-iters",
                    "--budget", "--model"}) {
    EXPECT_NE(slice.out.find(flag), std::string::npos) << flag;
  }
  auto eval = cli({"eval", "--help"});
  for (auto flag : {"--benchmark", "--predictions", "--format", "--workers", "--manifest"}) {
    EXPECT_NE(eval.out.find(flag), std::string::npos) << flag;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"slice"}).code, kExitUsage);
  EXPECT_EQ(cli({"slice", "--workspace", top3() + "/workspace", "--criterion", "Main.java"}).code, kExitUsage);
  EXPECT_EQ(cli({"slice", "--workspace", top3() + "/workspace", "--criterion", "Main.java:999", "--replay",
                 top3() + "/cassette.jsonl"})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"slice", "--workspace", top3() + "/workspace", "--criterion", "Nope.java:1", "--replay",
                 top3() + "/cassette.jsonl"})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"slice", "--workspace", top3() + "/workspace", "--criterion", "Main.java:19", "--replay", "a",
                 "--record", "b"})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"eval", "--benchmark", "x.json", "--format", "yaml"}).code, kExitUsage);
}

TEST(Cli, LiveModeWithoutKeyIsUsageError) {
  NoApiKey guard;
  auto r = cli({"slice", "--workspace", top3() + "/workspace", "--criterion", "Main.java:19"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("SLICEMATE_API_KEY"), std::string::npos);
}

TEST(Cli, SliceReplayWritesSliceTranscriptAndManifest) {
  auto dir = temp_dir("cli-slice");
  auto r = cli({"slice", "--workspace", top3() + "/workspace", "--criterion", "Main.java:19:list", "--replay",
                top3() + "/cassette.jsonl", "--out", (dir / "slice.json").string(), "--transcript",
                (dir / "t.jsonl").string(), "--manifest", (dir / "m.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto doc = json::parse(read_file(dir / "slice.json"));
  std::vector<int> lines;
  for (const auto& l : doc["lines"]) lines.push_back(l["line"]);
  EXPECT_EQ(lines, (std::vector<int>{1, 3, 4, 7, 8, 9, 10, 11, 12, 19, 22, 24, 25, 26, 27, 28, 29, 30, 31, 32}));
  EXPECT_FALSE(read_file(dir / "t.jsonl").empty());
  auto manifest = json::parse(read_file(dir / "m.json"));
  EXPECT_EQ(manifest["outcome"], "ok");
  EXPECT_EQ(manifest["counters"]["synthesis_passes"], 3);
  EXPECT_EQ(manifest["counters"]["refinements"], 0);
}

TEST(Cli, ReplayMissExitsThreeWithErrorMarker) {
  auto dir = temp_dir("cli-miss");
  auto r = cli({"slice", "--workspace", top3() + "/workspace", "--criterion", "Main.java:12", "--replay",
                top3() + "/cassette.jsonl", "--out", (dir / "slice.json").string()});
  EXPECT_EQ(r.code, kExitPipeline);
  EXPECT_NE(r.err.find("ReplayMiss"), std::string::npos) << r.err;
  auto doc = json::parse(read_file(dir / "slice.json"));
  EXPECT_TRUE(doc.contains("error"));
  EXPECT_TRUE(doc["lines"].empty());
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

TEST(Cli, EvalPerfectPredictionsScoreOne) {
  auto bench = fixture_dir() / "bench" / "benchmark.json";
  auto instances = load_benchmark(bench);
  auto dir = temp_dir("cli-pred");
  for (const auto& inst : instances) {
    Slice s(inst.criterion);
    for (const auto& [file, line] : inst.ground_truth) s.insert({file, line, inst.workspace->file(file).line(line)});
    write(dir / (inst.id + ".json"), slice_to_json(s).dump());
  }
  auto r = cli({"eval", "--benchmark", bench.string(), "--predictions", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto report = json::parse(r.out);
  for (const auto& g : report["groups"]) {
    for (auto key : {"precision", "recall", "f1", "accuracy", "acc_em"}) EXPECT_DOUBLE_EQ(g[key].get<double>(), 1.0);
  }
  auto csv = cli({"eval", "--benchmark", bench.string(), "--predictions", dir.string(), "--format", "csv"});
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "group,n,precision,recall,f1,accuracy,acc_em");
}

TEST(Cli, EvalSchemaErrorsExitFour) {
  auto dir = temp_dir("cli-schema");
  write(dir / "bad.json", R"({"instances": [{"id": "x"}]})");
  EXPECT_EQ(cli({"eval", "--benchmark", (dir / "bad.json").string(), "--predictions", dir.string()}).code,
            kExitSchema);

  auto bench = fixture_dir() / "bench" / "benchmark.json";
  auto first = load_benchmark(bench).front().id;
  auto preds = temp_dir("cli-badpred");
  write(preds / (first + ".json"), "{not json");
  EXPECT_EQ(cli({"eval", "--benchmark", bench.string(), "--predictions", preds.string()}).code, kExitSchema);
}

TEST(Cli, CassetteInspectMergeVerify) {
  auto cas = (fixture_dir() / "top_three" / "cassette.jsonl").string();
  auto inspect = cli({"cassette", "inspect", cas});
  EXPECT_EQ(inspect.code, kExitOk);
  EXPECT_NE(inspect.out.find("entries: 6"), std::string::npos) << inspect.out;

  EXPECT_EQ(cli({"cassette", "verify", cas}).code, kExitOk);

  auto dir = temp_dir("cli-cassette");
  auto merged = (dir / "merged.jsonl").string();
  auto rec = (fixture_dir() / "recursion" / "cassette.jsonl").string();
  ASSERT_EQ(cli({"cassette", "merge", cas, rec, "--out", merged}).code, kExitOk);
  EXPECT_NE(cli({"cassette", "inspect", merged}).out.find("entries: 15"), std::string::npos);

  // Same fingerprint, different response: a merge conflict.
  auto lines = read_file(cas);
  auto first = json::parse(lines.substr(0, lines.find('\n')));
  first["response"]["text"] = "something else";
  write(dir / "conflict.jsonl", first.dump() + "\n");
  EXPECT_EQ(cli({"cassette", "merge", cas, (dir / "conflict.jsonl").string(), "--out", merged}).code,
            kExitCassette);

  // Same fingerprint, edited request: verification fails.
  auto tampered = json::parse(lines.substr(0, lines.find('\n')));
  tampered["request"]["temperature"] = 1.5;
  write(dir / "tampered.jsonl", tampered.dump() + "\n");
  EXPECT_EQ(cli({"cassette", "verify", (dir / "tampered.jsonl").string()}).code, kExitCassette);

  write(dir / "corrupt.jsonl", "{\"fingerprint\": 3}\n");
  EXPECT_EQ(cli({"cassette", "inspect", (dir / "corrupt.jsonl").string()}).code, kExitCassette);
}

}  // namespace
}  // namespace agentslice::testing
