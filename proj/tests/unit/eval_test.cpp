#include <gtest/gtest.h>

#include <fstream>

#include "agentslice/eval.hpp"
#include "support/fake_agents.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

namespace agentslice {
namespace {

using nlohmann::json;

LineSet lines_of(const std::string& file, std::vector<int> ls) {
  LineSet out;
  for (int l : ls) out.emplace(file, l);
  return out;
}

json one_instance() {
  return json::parse(R"j({"instances":[{
    "id": "py-1", "language": "python", "source_tag": "codenet",
    "files": [{"path": "a.py", "content": "x = 1\ny = 2\n# note\nz = x + 1\nprint(z)\n"}],
    "criterion": {"file": "a.py", "line": 5, "variables": ["z"]},
    "ground_truth": [{"file": "a.py", "lines": [1, 4, 5]}],
    "buggy_lines": [{"file": "a.py", "lines": [4]}]
  }]})j");
}

std::string schema_error(const json& doc) {
  try {
    parse_benchmark(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    return e.what();
  }
  ADD_FAILURE() << "no SchemaError";
  return {};
}

TEST(Benchmark, LoadsValidInstance) {
  auto insts = parse_benchmark(one_instance());
  ASSERT_EQ(insts.size(), 1u);
  const auto& i = insts[0];
  EXPECT_EQ(i.id, "py-1");
  EXPECT_EQ(i.language, Language::python);
  EXPECT_EQ(i.criterion.statement_text, "print(z)");
  EXPECT_EQ(i.criterion.variables, std::vector<std::string>{"z"});
  EXPECT_EQ(i.ground_truth, lines_of("a.py", {1, 4, 5}));
  ASSERT_TRUE(i.buggy_lines);
  EXPECT_EQ(*i.buggy_lines, lines_of("a.py", {4}));
  auto again = parse_benchmark(benchmark_to_json(insts));
  EXPECT_EQ(again[0].ground_truth, i.ground_truth);
  EXPECT_EQ(benchmark_to_json(again), benchmark_to_json(insts));
}

TEST(Benchmark, SchemaErrorsNamePointers) {
  auto doc = one_instance();
  doc["instances"][0]["ground_truth"][0]["lines"][1] = 99;
  auto msg = schema_error(doc);
  EXPECT_NE(msg.find("py-1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("/instances/0/ground_truth/0/lines/1"), std::string::npos) << msg;

  doc = one_instance();
  doc["instances"][0].erase("criterion");
  EXPECT_NE(schema_error(doc).find("/instances/0/criterion"), std::string::npos);

  doc = one_instance();
  doc["instances"][0]["language"] = "cobol";
  EXPECT_NE(schema_error(doc).find("/instances/0/language"), std::string::npos);

  doc = one_instance();
  doc["instances"][0]["source_tag"] = "mine";
  EXPECT_NE(schema_error(doc).find("/instances/0/source_tag"), std::string::npos);

  doc = one_instance();
  doc["instances"].push_back(doc["instances"][0]);
  EXPECT_NE(schema_error(doc).find("/instances/1/id"), std::string::npos);

  doc = one_instance();
  doc["instances"][0]["criterion"]["file"] = "b.py";
  EXPECT_NE(schema_error(doc).find("/instances/0/criterion/file"), std::string::npos);

  doc = one_instance();
  doc["instances"][0]["ground_truth"] = json::array();
  EXPECT_NE(schema_error(doc).find("/instances/0/ground_truth"), std::string::npos);

  EXPECT_NE(schema_error(json::array()).find("expected an object"), std::string::npos);

  auto dir = testing::temp_dir("bench");
  std::ofstream(dir / "bad.json") << "{ nope";
  EXPECT_THROW(load_benchmark(dir / "bad.json"), Error);
  EXPECT_THROW(load_benchmark(dir / "missing.json"), Error);
}

TEST(Universe, DropsBlankCommentAndDelimiterLines) {
  auto java = testing::make_workspace({{"A.java",
                                        "class A {\n"
                                        "  int x = 1;\n"
                                        "\n"
                                        "  // comment\n"
                                        "  void f() { x++; }\n"
                                        "}\n"
                                        "  }\n",
                                        std::nullopt}});
  EXPECT_EQ(statement_universe(*java), lines_of("A.java", {1, 2, 5}));
  auto comments = testing::make_workspace({{"c.py", "# a\n# b\n\n", std::nullopt}});
  EXPECT_TRUE(statement_universe(*comments).empty());
  auto py = testing::make_workspace({{"p.py", "a = 1\n\nb = a\nprint(b)\n", std::nullopt}});
  EXPECT_EQ(statement_universe(*py), lines_of("p.py", {1, 3, 4}));
}

TEST(Metrics, WorkedExample) {
  auto u = lines_of("f", {1, 2, 3, 4, 5, 6});
  auto row = score_lines(u, lines_of("f", {1, 3, 5}), lines_of("f", {1, 3}));
  EXPECT_DOUBLE_EQ(row.precision, 1.0);
  EXPECT_NEAR(row.recall, 0.6667, 5e-5);
  EXPECT_NEAR(row.f1, 0.8, 1e-12);
  EXPECT_NEAR(row.accuracy, 0.8333, 5e-5);
  EXPECT_FALSE(row.exact_match);
  EXPECT_EQ(row.counts, (ConfusionCounts{2, 0, 1, 3}));
}

TEST(Metrics, IdentityAndEmpty) {
  auto u = lines_of("f", {1, 2, 3, 4});
  auto same = score_lines(u, lines_of("f", {2, 3}), lines_of("f", {2, 3}));
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.f1, 1.0);
  EXPECT_EQ(same.accuracy, 1.0);
  EXPECT_TRUE(same.exact_match);
  auto empty = score_lines(u, lines_of("f", {1}), {});
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.recall, 0.0);
  EXPECT_EQ(empty.f1, 0.0);
  EXPECT_DOUBLE_EQ(empty.accuracy, 3.0 / 4.0);
  EXPECT_FALSE(empty.exact_match);
}

TEST(Metrics, OutOfUniversePredictionsAreFilteredWithWarning) {
  auto u = lines_of("f", {1, 2, 4});
  auto row = score_lines(u, lines_of("f", {1, 4}), lines_of("f", {1, 3, 4}));
  EXPECT_TRUE(row.exact_match);
  EXPECT_EQ(row.precision, 1.0);
  ASSERT_EQ(row.warnings.size(), 1u);
  EXPECT_NE(row.warnings[0].find("f:3"), std::string::npos);
}

TEST(Metrics, MatchesBruteForceOnRandomTriples) {
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    auto t = testing::random_triple(rng, 200);
    auto want = testing::brute_force_score(t.lines, t.in_universe, t.gt, t.pred);
    auto got = score_lines(t.universe_set(), t.gt_set(), t.pred_set());
    ASSERT_EQ(got.counts, (ConfusionCounts{want.tp, want.fp, want.fn, want.tn})) << i;
    ASSERT_EQ(got.precision, want.precision) << i;
    ASSERT_EQ(got.recall, want.recall) << i;
    ASSERT_EQ(got.f1, want.f1) << i;
    ASSERT_EQ(got.accuracy, want.accuracy) << i;
    ASSERT_EQ(got.exact_match, want.exact) << i;
    ASSERT_NEAR(static_cast<double>(got.counts.tp + got.counts.tn),
                got.accuracy * static_cast<double>(got.counts.total()), 1e-9)
        << i;
    if (got.precision > 0 && got.recall > 0) {
      ASSERT_NEAR(got.f1, 2 / (1 / got.precision + 1 / got.recall), 1e-12);
    }
    if (got.exact_match && !t.gt_set().empty()) {
      ASSERT_EQ(got.precision, 1.0);
      ASSERT_EQ(got.recall, 1.0);
      ASSERT_EQ(got.f1, 1.0);
      ASSERT_EQ(got.accuracy, 1.0);
    }
  }
}

TEST(Ratios, Examples) {
  auto buggy = lines_of("f", {10, 12});
  auto r = ratio_metrics({{lines_of("f", {10, 11, 12}), buggy},
                          {lines_of("f", {10}), buggy},
                          {lines_of("f", {1}), buggy},
                          {lines_of("f", {10, 12}), buggy}});
  EXPECT_DOUBLE_EQ(r.ratio_1, 0.75);
  EXPECT_DOUBLE_EQ(r.ratio_all, 0.5);
  EXPECT_EQ(r.n, 4u);
  try {
    ratio_metrics({{lines_of("f", {1}), {}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingBuggyLines);
  }
  EXPECT_THROW(ratio_metrics({}), Error);
}

TEST(Ratios, MatchDirectCounting) {
  std::mt19937 rng(11);
  std::vector<std::pair<LineSet, LineSet>> input;
  int one = 0, all = 0;
  for (int i = 0; i < 200; ++i) {
    auto c = testing::random_ratio_case(rng);
    one += c.hit_one;
    all += c.hit_all;
    input.emplace_back(c.slice, c.buggy);
  }
  auto r = ratio_metrics(input);
  EXPECT_EQ(r.ratio_1, one / 200.0);
  EXPECT_EQ(r.ratio_all, all / 200.0);
  EXPECT_LE(r.ratio_all, r.ratio_1);
}

MetricsRow row(std::string lang, std::string tag, double p, bool em = false) {
  MetricsRow r;
  r.language = std::move(lang);
  r.source_tag = std::move(tag);
  r.precision = r.recall = r.f1 = r.accuracy = p;
  r.exact_match = em;
  return r;
}

TEST(Aggregate, MeansAndGroups) {
  auto one = aggregate({row("python", "codenet", 0.4, true)});
  ASSERT_EQ(one.groups.size(), 2u);
  EXPECT_EQ(one.groups[0].group, "python/codenet");
  EXPECT_EQ(one.groups[0].precision, 0.4);
  EXPECT_EQ(one.groups[0].acc_em, 1.0);
  EXPECT_EQ(one.groups[1].group, "all");

  auto two = aggregate({row("java", "codenet", 1.0, true), row("java", "codenet", 0.5)});
  EXPECT_DOUBLE_EQ(two.groups[0].precision, 0.75);
  EXPECT_DOUBLE_EQ(two.groups[0].acc_em, 0.5);

  auto split = aggregate({row("java", "github", 1.0), row("java", "codenet", 0.0), row("python", "github", 0.5)});
  ASSERT_EQ(split.groups.size(), 4u);
  EXPECT_EQ(split.groups[0].group, "java/codenet");
  EXPECT_EQ(split.groups[1].group, "java/github");
  EXPECT_EQ(split.groups[2].group, "python/github");
  EXPECT_EQ(split.groups[3].n, 3u);
  EXPECT_THROW(aggregate({}), Error);
}

TEST(Report, Formats) {
  auto s = aggregate({row("java", "github", 1.0 / 3.0, true), row("python", "codenet", 0.5)});
  s.ratios = RatioMetrics{0.75, 0.5, 4};
  auto back = summary_from_json(json::parse(emit_report(s, ReportFormat::json)));
  ASSERT_EQ(back.groups.size(), s.groups.size());
  for (std::size_t i = 0; i < s.groups.size(); ++i) {
    EXPECT_EQ(back.groups[i].group, s.groups[i].group);
    EXPECT_EQ(back.groups[i].precision, s.groups[i].precision);
    EXPECT_EQ(back.groups[i].acc_em, s.groups[i].acc_em);
  }
  EXPECT_EQ(back.ratios->ratio_all, 0.5);
  auto csv = emit_report(s, ReportFormat::csv);
  EXPECT_TRUE(csv.starts_with("group,n,precision,recall,f1,accuracy,acc_em\n"));
  EXPECT_NE(csv.find("java/github,1,0.3333,0.3333,0.3333,0.3333,1.0000"), std::string::npos) << csv;
  auto md = emit_report(s, ReportFormat::markdown);
  EXPECT_NE(md.find("| Group | N | Prec. | Rec. | F1 | Acc-EM | Acc. |"), std::string::npos);
  for (const auto& g : s.groups) EXPECT_NE(md.find("| " + g.group + " |"), std::string::npos);
  EXPECT_EQ(parse_report_format("md"), ReportFormat::markdown);
  EXPECT_FALSE(parse_report_format("xml"));
}

TEST(Evaluate, PerfectPredictionsGiveOnes) {
  auto insts = parse_benchmark(one_instance());
  auto ev = evaluate(insts, {insts[0].ground_truth});
  EXPECT_EQ(ev.summary.groups.back().f1, 1.0);
  EXPECT_EQ(ev.summary.groups.back().acc_em, 1.0);
  ASSERT_TRUE(ev.summary.ratios);
  EXPECT_EQ(ev.summary.ratios->ratio_all, 1.0);
  auto missing = evaluate(insts, {std::nullopt});
  EXPECT_EQ(missing.rows[0].precision, 0.0);
  EXPECT_FALSE(missing.rows[0].warnings.empty());
}

TEST(Runner, WorkersKeepInstanceOrder) {
  auto doc = one_instance();
  auto base = doc["instances"][0];
  doc["instances"] = json::array();
  for (int i = 0; i < 6; ++i) {
    auto inst = base;
    inst["id"] = "py-" + std::to_string(i);
    inst["files"][0]["content"] = "x = " + std::to_string(i) + "\ny = 2\n# note\nz = x + 1\nprint(z)\n";
    doc["instances"].push_back(inst);
  }
  auto insts = parse_benchmark(doc);
  std::map<std::string, std::set<std::string>> target;
  for (int i = 0; i < 6; ++i) {
    target["a.py"].insert("x = " + std::to_string(i));
  }
  target["a.py"].insert("z = x + 1");
  target["a.py"].insert("print(z)");
  auto backend = std::make_shared<testing::OracleBackend>(target);
  auto serial = run_instances(insts, backend, {}, PromptLibrary::defaults(), 1);
  auto parallel = run_instances(insts, backend, {}, PromptLibrary::defaults(), 4);
  ASSERT_EQ(parallel.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(parallel[i].id, "py-" + std::to_string(i));
    EXPECT_TRUE(parallel[i].ok) << parallel[i].error;
    EXPECT_EQ(to_line_set(*parallel[i].slice), lines_of("a.py", {1, 4, 5}));
    EXPECT_EQ(transcript_jsonl(parallel[i].transcript), transcript_jsonl(serial[i].transcript));
  }
  EXPECT_THROW(run_instances(insts, backend, {}, PromptLibrary::defaults(), 0), Error);
}

TEST(Runner, FailuresKeepLastValidSlice) {
  auto insts = parse_benchmark(one_instance());
  auto backend = std::make_shared<testing::ScriptedBackend>(std::vector<std::string>{"x", "y"});
  auto out = run_instances(insts, backend, {}, PromptLibrary::defaults(), 2);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].ok);
  EXPECT_TRUE(out[0].error.starts_with("ParseError"));
  EXPECT_FALSE(out[0].slice);
  EXPECT_EQ(out[0].transcript.size(), 2u);
  EXPECT_GT(out[0].tokens, 0);
}

}  // namespace
}  // namespace agentslice
