#include <gtest/gtest.h>

#include "agentslice/agents.hpp"
#include "support/corpus.hpp"
#include "support/fake_agents.hpp"
#include "support/helpers.hpp"

namespace agentslice {
namespace {

using testing::OracleBackend;
using testing::ScriptedBackend;

const char* kMain = "src/app/Main.java";

std::set<std::pair<std::string, int>> as_set(const Slice& s) {
  auto refs = s.refs();
  return {refs.begin(), refs.end()};
}

std::set<std::pair<std::string, int>> on(const std::string& file, std::vector<int> lines) {
  std::set<std::pair<std::string, int>> out;
  for (int l : lines) out.emplace(file, l);
  return out;
}

struct JavaCase {
  std::shared_ptr<const SyntaxIndex> index = testing::index_of(testing::property_corpus());
  std::vector<int> wanted = {1, 6, 7, 10, 11, 12, 13, 14, 15, 16, 17, 19, 21, 24, 25, 26, 27};
  SlicingCriterion criterion = make_criterion(index->workspace(), kMain, 21, {"total", "list"});
  std::map<std::string, std::set<std::string>> target() const {
    return testing::target_lines(index->workspace(), {{kMain, wanted}});
  }
};

TEST(Session, OracleFlowReachesCalleeAndModuleContext) {
  JavaCase c;
  auto backend = std::make_shared<OracleBackend>(c.target());
  SliceSession session(c.index, c.criterion, backend);
  auto slice = session.run_synthesis();
  EXPECT_EQ(as_set(slice), on(kMain, c.wanted));
  EXPECT_EQ(session.counters().expansion_rounds, 1);
  EXPECT_EQ(session.counters().synthesis_passes, 3);
  EXPECT_TRUE(session.visited_functions().contains("src/app/Main.java::Main.max(int)"));
  EXPECT_EQ(session.entered_functions().at("src/app/Main.java::Main.max(int)"), 1);
  EXPECT_TRUE(session.scope().contains(kMain, 7));
  EXPECT_TRUE(session.scope().contains(kMain, 1));
  EXPECT_FALSE(session.scope().contains("src/app/Util.java", 5));
}

TEST(Pipeline, CompleteSliceNeedsNoRefinement) {
  JavaCase c;
  auto backend = std::make_shared<OracleBackend>(c.target());
  auto result = run_pipeline(c.index, c.criterion, backend);
  EXPECT_EQ(as_set(result.slice), on(kMain, c.wanted));
  EXPECT_EQ(result.counters.refinements, 0);
  EXPECT_EQ(result.counters.verify_refine_rounds, 1);
  ASSERT_EQ(result.reports.size(), 1u);
  EXPECT_EQ(result.reports[0].completeness.verdict, Verdict::complete);
  EXPECT_TRUE(result.reports[0].removed_lines.empty());
  EXPECT_GT(result.tokens_used, 0);
}

TEST(Pipeline, VerificationRecoversWithheldLine) {
  JavaCase c;
  OracleBackend::Options opts;
  opts.withheld = {std::string(*c.index->workspace().line_text(kMain, 17))};
  auto backend = std::make_shared<OracleBackend>(c.target(), opts);
  auto result = run_pipeline(c.index, c.criterion, backend);
  EXPECT_EQ(as_set(result.slice), on(kMain, c.wanted));
  EXPECT_EQ(result.counters.refinements, 1);
  EXPECT_EQ(result.counters.verify_refine_rounds, 2);
}

TEST(Pipeline, ConcisenessDropsExtraLines) {
  JavaCase c;
  // The synthesis agent returns more than the target; conciseness trims it.
  auto wide = c.target();
  wide[kMain].insert(std::string(*c.index->workspace().line_text(kMain, 3)));
  wide[kMain].insert(std::string(*c.index->workspace().line_text(kMain, 4)));
  struct Wide : OracleBackend {
    using OracleBackend::OracleBackend;
  };
  auto narrow = c.target();
  auto synth = std::make_shared<OracleBackend>(wide);
  SliceSession session(c.index, c.criterion, synth);
  auto slice = session.run_synthesis();
  EXPECT_TRUE(slice.contains(kMain, 3));
  EXPECT_TRUE(slice.contains(kMain, 4));
  SliceSession trimmer(c.index, c.criterion, std::make_shared<OracleBackend>(narrow));
  trimmer.run_synthesis();
  auto [kept, removed] = trimmer.run_conciseness(slice);
  EXPECT_EQ(as_set(kept), on(kMain, c.wanted));
  ASSERT_EQ(removed.size(), 2u);
  EXPECT_EQ(removed[0].line, 3);
  EXPECT_EQ(removed[1].line, 4);
}

class VerifyLoop : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(VerifyLoop, RoundsFollowTheVerdicts) {
  auto [incomplete, expected_refinements] = GetParam();
  JavaCase c;
  OracleBackend::Options opts;
  opts.incomplete_calls = incomplete;
  auto backend = std::make_shared<OracleBackend>(c.target(), opts);
  auto result = run_pipeline(c.index, c.criterion, backend);
  EXPECT_EQ(result.counters.refinements, expected_refinements);
  EXPECT_EQ(result.counters.completeness_calls, std::min(incomplete + 1, 5));
  EXPECT_EQ(result.counters.verify_refine_rounds, std::min(incomplete + 1, 5));
  EXPECT_EQ(backend->calls(AgentKind::refinement), expected_refinements);
}

INSTANTIATE_TEST_SUITE_P(Verdicts, VerifyLoop,
                         ::testing::Values(std::pair{0, 0}, std::pair{2, 2}, std::pair{4, 4},
                                           std::pair{100, 5}));

TEST(Pipeline, CompletionAfterThirdRefinement) {
  JavaCase c;
  OracleBackend::Options opts;
  opts.incomplete_calls = 3;
  auto result = run_pipeline(c.index, c.criterion, std::make_shared<OracleBackend>(c.target(), opts));
  EXPECT_EQ(result.counters.refinements, 3);
  EXPECT_EQ(result.counters.verify_refine_rounds, 4);
  // 3 synthesis passes + 1 expansion, then 3 full rounds and a final check.
  EXPECT_EQ(result.transcript.size(), 4u + 3 * 3 + 2);
  EXPECT_EQ(result.reports.size(), 4u);
  EXPECT_EQ(result.reports.back().completeness.verdict, Verdict::complete);
}

TEST(Session, MutualRecursionEntersEachBodyOnce) {
  auto index = testing::index_of({{"rec.py",
                                   "def g(n):\n"
                                   "    if n <= 0:\n"
                                   "        return 0\n"
                                   "    return h(n - 1) + 1\n"
                                   "\n"
                                   "def h(n):\n"
                                   "    if n <= 0:\n"
                                   "        return 0\n"
                                   "    return g(n - 1) * 2\n"
                                   "\n"
                                   "def main():\n"
                                   "    r = g(5)\n"
                                   "    print(r)\n",
                                   std::nullopt}});
  auto target = testing::target_lines(index->workspace(), {{"rec.py", {1, 2, 3, 4, 6, 7, 8, 9, 11, 12, 13}}});
  auto backend = std::make_shared<OracleBackend>(target);
  auto result = run_pipeline(index, make_criterion(index->workspace(), "rec.py", 13), backend);
  EXPECT_EQ(as_set(result.slice), on("rec.py", {1, 2, 3, 4, 6, 7, 8, 9, 11, 12, 13}));
  EXPECT_EQ(result.counters.expansion_rounds, 2);
  EXPECT_EQ(backend->calls(AgentKind::expansion), 2);

  SliceSession session(index, make_criterion(index->workspace(), "rec.py", 13), backend);
  session.run_synthesis();
  for (const auto& [fn, n] : session.entered_functions()) EXPECT_EQ(n, 1) << fn;
  EXPECT_EQ(session.entered_functions().size(), 3u);
}

TEST(Session, ExpansionStopsAtRoundCap) {
  // A call chain longer than the cap.
  std::string src;
  for (int i = 0; i < 6; ++i) {
    src += "def f" + std::to_string(i) + "(x):\n    return f" + std::to_string(i + 1) + "(x)\n\n";
  }
  src += "def f6(x):\n    return x\n\ndef main():\n    v = f0(1)\n    print(v)\n";
  auto index = testing::index_of({{"chain.py", src, std::nullopt}});
  std::map<std::string, std::vector<int>> lines;
  for (int l = 1; l <= index->workspace().file("chain.py").line_count(); ++l) {
    auto t = index->workspace().line_text("chain.py", l);
    if (t && !t->empty()) lines["chain.py"].push_back(l);
  }
  auto backend = std::make_shared<OracleBackend>(testing::target_lines(index->workspace(), lines));
  SessionConfig cfg;
  cfg.max_expansion_rounds = 3;
  int crit = index->workspace().file("chain.py").line_count();
  SliceSession session(index, make_criterion(index->workspace(), "chain.py", crit), backend, cfg);
  session.run_synthesis();
  EXPECT_EQ(session.counters().expansion_rounds, 3);
  EXPECT_LE(session.counters().synthesis_passes, 4);
  EXPECT_EQ(backend->calls(AgentKind::expansion), 3);
}

TEST(Session, FormatRetryOnce) {
  JavaCase c;
  OracleBackend::Options opts;
  opts.garbage[AgentKind::synthesis] = 1;
  auto backend = std::make_shared<OracleBackend>(c.target(), opts);
  auto result = run_pipeline(c.index, c.criterion, backend);
  EXPECT_EQ(result.counters.format_retries, 1);
  EXPECT_EQ(as_set(result.slice), on(kMain, c.wanted));
  ASSERT_GE(result.transcript.size(), 2u);
  EXPECT_FALSE(result.transcript[0].format_retry);
  EXPECT_TRUE(result.transcript[1].format_retry);
  auto retry = backend->requests()[1];
  ASSERT_EQ(retry.messages.size(), 3u);
  EXPECT_EQ(retry.messages[1].role, "assistant");
  EXPECT_EQ(retry.messages[2].text, render_format_reminder(PromptLibrary::defaults()));
}

TEST(Pipeline, SecondParseFailureFailsClosed) {
  JavaCase c;
  OracleBackend::Options opts;
  opts.garbage[AgentKind::completeness] = 2;
  auto backend = std::make_shared<OracleBackend>(c.target(), opts);
  try {
    run_pipeline(c.index, c.criterion, backend);
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.cause(), ErrorKind::ParseError);
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_TRUE(std::string(e.what()).starts_with("ParseError: "));
    EXPECT_EQ(std::string(e.what()).find("ParseError: ParseError"), std::string::npos);
    ASSERT_TRUE(e.last_valid().has_value());
    EXPECT_EQ(as_set(*e.last_valid()), on(kMain, c.wanted));
    EXPECT_EQ(e.counters().format_retries, 1);
    EXPECT_EQ(e.transcript().back().agent, AgentKind::completeness);
  }
}

TEST(Pipeline, SynthesisFailureHasNoSlice) {
  JavaCase c;
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"no", "still no"});
  try {
    run_pipeline(c.index, c.criterion, backend);
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.cause(), ErrorKind::ParseError);
    EXPECT_FALSE(e.last_valid().has_value());
    EXPECT_EQ(e.transcript().size(), 2u);
  }
}

TEST(Pipeline, BudgetExhaustionStops) {
  JavaCase c;
  SessionConfig cfg;
  cfg.token_budget = 250;  // two replies of 120 tokens fit, the third does not
  auto backend = std::make_shared<OracleBackend>(c.target());
  try {
    run_pipeline(c.index, c.criterion, backend, cfg);
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.cause(), ErrorKind::BudgetExceeded);
    EXPECT_EQ(e.transcript().size(), 3u);
  }
}

TEST(Pipeline, InventedLinesAreReportedNotKept) {
  JavaCase c;
  OracleBackend::Options opts;
  opts.invented = {"int ghost = compute(42);"};
  auto backend = std::make_shared<OracleBackend>(c.target(), opts);
  auto result = run_pipeline(c.index, c.criterion, backend);
  EXPECT_EQ(as_set(result.slice), on(kMain, c.wanted));
  ASSERT_FALSE(result.hallucinated.empty());
  EXPECT_EQ(result.hallucinated[0].text, "int ghost = compute(42);");
}

TEST(Session, RefinementRejectsLinesOutsideScope) {
  auto index = testing::index_of(testing::property_corpus());
  const char* util = "src/app/Util.java";
  auto crit = make_criterion(index->workspace(), util, 6);
  auto synth = write_slice_answer({{util, "static int twice(int x) {"}, {util, "int y = x * 2;"}, {util, "return y;"}});
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{
      synth, synth, write_slice_answer({{util, "if (x < lo) return lo;"}, {util, "package app;"}})});
  SliceSession session(index, crit, backend);
  auto slice = session.run_synthesis();
  EXPECT_EQ(as_set(slice), on(util, {4, 5, 6}));
  auto refined = session.run_refinement(slice, {{"package declaration", MissingKind::structural}});
  EXPECT_EQ(as_set(refined), on(util, {1, 4, 5, 6}));
  const auto& summary = session.transcript().back().summary;
  ASSERT_EQ(summary["rejected_outside_scope"].size(), 1u);
  EXPECT_EQ(summary["rejected_outside_scope"][0], "if (x < lo) return lo;");
}

TEST(Session, ConcisenessIgnoresUnalignableReply) {
  auto index = testing::index_of(testing::property_corpus());
  const char* util = "src/app/Util.java";
  auto crit = make_criterion(index->workspace(), util, 6);
  auto synth = write_slice_answer({{util, "int y = x * 2;"}, {util, "return y;"}});
  auto backend = std::make_shared<ScriptedBackend>(
      std::vector<std::string>{synth, synth, write_slice_answer({{util, "return x;"}})});
  SliceSession session(index, crit, backend);
  auto slice = session.run_synthesis();
  auto [kept, removed] = session.run_conciseness(slice);
  EXPECT_EQ(kept, slice);
  EXPECT_TRUE(removed.empty());
  EXPECT_TRUE(session.transcript().back().summary.contains("ignored_reply"));
}

TEST(Session, RequestsCarryConfig) {
  JavaCase c;
  SessionConfig cfg;
  cfg.model_id = "test-model";
  cfg.system_message = "be brief";
  auto backend = std::make_shared<OracleBackend>(c.target());
  SliceSession(c.index, c.criterion, backend, cfg).run_synthesis();
  for (const auto& r : backend->requests()) {
    EXPECT_EQ(r.model_id, "test-model");
    EXPECT_EQ(r.temperature, 0.0);
    ASSERT_EQ(r.messages.front().role, "system");
    EXPECT_EQ(r.messages.front().text, "be brief");
  }
  auto plain = std::make_shared<OracleBackend>(c.target());
  SliceSession(c.index, c.criterion, plain).run_synthesis();
  for (const auto& r : plain->requests()) EXPECT_EQ(r.messages.front().role, "user");
}

TEST(Session, InvariantsRejectForeignText) {
  JavaCase c;
  SliceSession session(c.index, c.criterion, std::make_shared<OracleBackend>(c.target()));
  session.run_synthesis();
  Slice bad = session.current();
  bad.insert({kMain, 8, "int total = 1;"});
  EXPECT_THROW(session.check_invariants(bad), Error);
  try {
    session.check_invariants(bad);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvariantViolation);
  }
  Slice wrong_line = session.current();
  wrong_line.insert({kMain, 999, "x"});
  EXPECT_THROW(session.check_invariants(wrong_line), Error);
}

TEST(Session, InvariantChecksRunAfterEachStep) {
  JavaCase c;
  auto result = run_pipeline(c.index, c.criterion, std::make_shared<OracleBackend>(c.target()));
  EXPECT_GE(result.counters.invariant_checks, static_cast<int>(result.transcript.size()));
}

TEST(Session, RejectsBadConfigAndCriterion) {
  JavaCase c;
  auto backend = std::make_shared<OracleBackend>(c.target());
  SessionConfig cfg;
  cfg.max_verify_refine = 0;
  EXPECT_THROW(SliceSession(c.index, c.criterion, backend, cfg), Error);
  auto crit = c.criterion;
  crit.statement_text = "int nope;";
  EXPECT_THROW(SliceSession(c.index, crit, backend), Error);
}

TEST(Transcript, JsonlIsDeterministic) {
  JavaCase c;
  auto run = [&] {
    return transcript_jsonl(run_pipeline(c.index, c.criterion, std::make_shared<OracleBackend>(c.target())).transcript);
  };
  auto a = run();
  EXPECT_EQ(a, run());
  std::istringstream in(a);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("agent"));
    EXPECT_TRUE(j.contains("summary"));
    EXPECT_FALSE(j.contains("latency_ms"));
    ++n;
  }
  EXPECT_GE(n, 6);

  auto dir = testing::temp_dir("transcript");
  write_transcript(run_pipeline(c.index, c.criterion, std::make_shared<OracleBackend>(c.target())).transcript,
                   dir / "sub" / "t.jsonl");
  EXPECT_EQ(testing::read_file(dir / "sub" / "t.jsonl"), a);
}

}  // namespace
}  // namespace agentslice
