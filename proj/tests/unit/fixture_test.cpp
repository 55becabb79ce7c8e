#include <cstdlib>

#include <gtest/gtest.h>

#include "agentslice/agents.hpp"
#include "agentslice/llm.hpp"
#include "support/criteria.hpp"
#include "support/fake_openai.hpp"
#include "support/fixture_cases.hpp"
#include "support/helpers.hpp"

namespace agentslice::testing {
namespace {

PipelineResult replay(const CaseFixture& c, const std::string& name) {
  auto backend = std::make_shared<CassetteBackend>(load_cassette(fixture_dir() / name / "cassette.jsonl"),
                                                   CassetteMode::replay);
  return run_pipeline(build_index(c.workspace), c.criterion, backend);
}

TEST(Fixtures, CassettesMatchTheirOracles) {
  auto out = temp_dir("cassettes");
  write_fixture_cassettes(fixture_dir(), out);
  for (const char* name : {"top_three", "recursion", "adversarial", "bench"}) {
    EXPECT_EQ(read_file(out / name / "cassette.jsonl"), read_file(fixture_dir() / name / "cassette.jsonl"))
        << name << " is stale; rerun record_fixtures";
  }
}

TEST(Fixtures, ReplaysYieldHandAuditedSlices) {
  for (const char* name : {"top_three", "recursion", "adversarial"}) {
    auto c = load_case(fixture_dir() / name);
    auto run = replay(c, name);
    EXPECT_EQ(to_line_set(run.slice), c.expected) << name;
  }
}

TEST(Fixtures, TopThreeKeepsDeclarationImportAndMaxBody) {
  auto c = load_case(fixture_dir() / "top_three");
  auto s = replay(c, "top_three").slice;
  EXPECT_TRUE(s.contains("Main.java", 1));   // import
  EXPECT_TRUE(s.contains("Main.java", 4));   // static int[] list
  EXPECT_TRUE(s.contains("Main.java", 26));  // inside max
  EXPECT_FALSE(s.contains("Main.java", 15)); // noise dropped by conciseness
}

TEST(Fixtures, OfflineCriteriaHold) {
  for (auto check : {check_control_loop_bound, check_expansion_termination, check_top_three}) {
    auto r = check();
    EXPECT_EQ(r.verdict, Verdict::pass) << format_result(r);
  }
}

// Criterion 9 wiring, served by a local endpoint instead of a real provider.
TEST(Fixtures, LiveSmokeAgainstLocalEndpoint) {
  auto inst = load_benchmark(fixture_dir() / "bench" / "benchmark.json").front();
  OracleBackend oracle(texts_of(*inst.workspace, inst.ground_truth), {});
  FakeOpenAI server([&](const std::string& prompt) {
    ChatRequest req;
    req.model_id = "gpt-4o";
    req.messages = {{"user", prompt}};
    return oracle.complete(req).text;
  });
  auto saved_key = std::getenv("SLICEMATE_API_KEY");
  auto saved_base = std::getenv("SLICEMATE_API_BASE");
  std::string key = saved_key ? saved_key : "", base = saved_base ? saved_base : "";
  ::setenv("SLICEMATE_API_KEY", "local-test", 1);
  ::setenv("SLICEMATE_API_BASE", server.base_url().c_str(), 1);
  auto r = check_live_smoke();
  if (saved_key) ::setenv("SLICEMATE_API_KEY", key.c_str(), 1); else ::unsetenv("SLICEMATE_API_KEY");
  if (saved_base) ::setenv("SLICEMATE_API_BASE", base.c_str(), 1); else ::unsetenv("SLICEMATE_API_BASE");
  EXPECT_EQ(r.verdict, Verdict::pass) << format_result(r);
  EXPECT_GT(server.requests(), 0);
}

}  // namespace
}  // namespace agentslice::testing
