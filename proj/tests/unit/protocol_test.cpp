#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "agentslice/error.hpp"
#include "agentslice/protocol.hpp"
#include "support/helpers.hpp"

using namespace agentslice;
using agentslice::testing::make_workspace;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvariantViolation;
}

struct Fixture {
  std::shared_ptr<const Workspace> ws = make_workspace(
      {{"a.py", "from b import helper\ndef f(a):\n    b = helper(a)\n    print(b)\n", std::nullopt},
       {"b.py", "def helper(x):\n    return x + 1\n", std::nullopt}});
  SlicingCriterion criterion = make_criterion(*ws, "a.py", 4);
  PromptLibrary lib = PromptLibrary::defaults();
};

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Templates, ShippedFilesMatchCompiledDefaults) {
  for (auto kind : kAllPrompts) {
    auto path = std::filesystem::path(AGENTSLICE_TEMPLATE_DIR) / (std::string(to_string(kind)) + ".tmpl");
    EXPECT_EQ(agentslice::testing::read_file(path), default_template_text(kind)) << path;
  }
}

TEST(Templates, Validation) {
  EXPECT_EQ(kind_of([] { parse_template("@role\nhi {{nope}}\n", "t"); }), ErrorKind::InvalidTemplate);
  EXPECT_EQ(kind_of([] { parse_template("@banner\nx\n", "t"); }), ErrorKind::InvalidTemplate);
  EXPECT_EQ(kind_of([] { parse_template("loose text\n@role\nx\n", "t"); }), ErrorKind::InvalidTemplate);
  EXPECT_EQ(kind_of([] { parse_template("@role\n{{criterion_file\n", "t"); }), ErrorKind::InvalidTemplate);
  auto t = parse_template("@role\nR {{statement}}\n\n@rules\n1. x\n", "t");
  EXPECT_EQ(t.role, "R {{statement}}");
  EXPECT_EQ(t.rules, "1. x");
}

TEST(Templates, DirectoryOverride) {
  auto dir = agentslice::testing::temp_dir("tmpl");
  std::ofstream(dir / "synthesis.tmpl") << "@role\nCustom slicer for {{criterion_file}}.\n";
  auto lib = PromptLibrary::load(dir);
  EXPECT_EQ(lib.get(PromptKind::synthesis).role, "Custom slicer for {{criterion_file}}.");
  EXPECT_EQ(lib.get(PromptKind::expansion).role, PromptLibrary::defaults().get(PromptKind::expansion).role);
  std::filesystem::remove_all(dir);
}

TEST(Render, SynthesisHasAllSectionsAndFileHeaders) {
  Fixture fx;
  SearchScope scope(fx.ws);
  scope.add({{"a.py", {2, 4}, RegionRole::criterion_scope}, {"b.py", {1, 2}, RegionRole::function_body}});
  auto p = render_synthesis_prompt(fx.lib, fx.criterion, scope);
  for (auto h : {"## Role", "## Input Data", "## Definitions", "## Rules", "## Output Format",
                 "=== File: a.py ===", "=== File: b.py ===", "program slicing assistant",
                 "Control dependence", "Inter-procedural", "Statement: print(b)", "Variables: b",
                 "{\"slices\":"}) {
    EXPECT_NE(p.find(h), std::string::npos) << h;
  }
  EXPECT_LT(p.find("## Role"), p.find("## Input Data"));
  EXPECT_LT(p.find("## Input Data"), p.find("## Definitions"));
  EXPECT_LT(p.find("## Definitions"), p.find("## Rules"));
  EXPECT_LT(p.find("## Rules"), p.find("## Output Format"));
  EXPECT_EQ(p, render_synthesis_prompt(fx.lib, fx.criterion, scope));  // deterministic
  EXPECT_EQ(p.find("{{"), std::string::npos);
}

TEST(Render, SynthesisBudget) {
  Fixture fx;
  SearchScope scope(fx.ws);
  scope.add(CodeRegion{"a.py", {1, 4}, RegionRole::criterion_scope});
  EXPECT_EQ(kind_of([&] { render_synthesis_prompt(fx.lib, fx.criterion, scope, RenderLimits{200}); }),
            ErrorKind::ScopeTooLarge);
  SearchScope empty(fx.ws);
  EXPECT_EQ(kind_of([&] { render_synthesis_prompt(fx.lib, fx.criterion, empty); }),
            ErrorKind::PreconditionViolation);
}

TEST(Render, Expansion) {
  Fixture fx;
  auto idx = build_index(fx.ws);
  auto catalog = list_project_functions(*idx);
  ASSERT_EQ(catalog.size(), 2u);
  std::vector<CallSite> calls = {{"helper", std::nullopt, 1, "a.py", 3},
                                 {"g", std::string("self"), 0, "a.py", 3},
                                 {"h", std::nullopt, 2, "a.py", 4}};
  auto p = render_expansion_prompt(fx.lib, *fx.ws, calls, catalog);
  EXPECT_NE(p.find("f(a)"), std::string::npos);
  EXPECT_NE(p.find("helper(x)"), std::string::npos);
  EXPECT_NE(p.find("1. call helper/1"), std::string::npos);
  EXPECT_NE(p.find("2. call g/0 (receiver: self)"), std::string::npos);
  EXPECT_NE(p.find("3. call h/2"), std::string::npos);
  EXPECT_NE(p.find("call resolution"), std::string::npos);
  auto none = render_expansion_prompt(fx.lib, *fx.ws, {calls[0]}, {});
  EXPECT_NE(none.find("(none)"), std::string::npos);
  EXPECT_EQ(kind_of([&] { render_expansion_prompt(fx.lib, *fx.ws, {}, catalog); }),
            ErrorKind::PreconditionViolation);
}

TEST(Render, ConcisenessCompletenessRefinement) {
  Fixture fx;
  Slice slice(fx.criterion);
  auto c = render_conciseness_prompt(fx.lib, slice, fx.criterion);
  EXPECT_NE(c.find("## Task"), std::string::npos);
  EXPECT_EQ(c.find("## Rules"), std::string::npos);
  EXPECT_NE(c.find("Never remove part of a line"), std::string::npos);
  EXPECT_NE(c.find("Never remove the criterion line"), std::string::npos);
  EXPECT_NE(c.find("print or logging"), std::string::npos);
  EXPECT_NE(c.find("program analyst"), std::string::npos);

  SearchScope scope(fx.ws);
  scope.add(CodeRegion{"a.py", {2, 4}, RegionRole::criterion_scope});
  auto k = render_completeness_prompt(fx.lib, slice, fx.criterion, scope);
  for (auto h : {"## Role", "## Input Data", "## Task", "## Output Format", "### Search Scope",
                 "### Candidate Slice", "structurally intact", "inspector"}) {
    EXPECT_NE(k.find(h), std::string::npos) << h;
  }
  EXPECT_EQ(kind_of([&] { render_completeness_prompt(fx.lib, slice, fx.criterion, SearchScope(fx.ws)); }),
            ErrorKind::PreconditionViolation);

  std::vector<MissingItem> two = {{"class header", MissingKind::structural},
                                  {"import of helper", MissingKind::structural}};
  auto r = render_refinement_prompt(fx.lib, slice, scope, two);
  EXPECT_NE(r.find("1. [structural] class header"), std::string::npos);
  EXPECT_NE(r.find("2. [structural] import of helper"), std::string::npos);
  EXPECT_NE(r.find("Reuse only lines that appear verbatim in the original code"), std::string::npos);
  EXPECT_NE(r.find("slice completer"), std::string::npos);
  EXPECT_EQ(kind_of([&] { render_refinement_prompt(fx.lib, slice, scope, {}); }),
            ErrorKind::PreconditionViolation);
}

TEST(Parse, SliceSchemaAndFallback) {
  auto a = parse_slice_response(R"j({"slices":[{"file":"a.py","lines":["b = a + 1"]}]})j");
  std::vector<RawLine> expected = {{"a.py", "b = a + 1"}};
  EXPECT_EQ(a, expected);
  EXPECT_EQ(parse_slice_response("Here you go:\n```a.py\nb = a + 1\n```\n"), expected);
  EXPECT_EQ(parse_slice_response("```json\n{\"slices\":[{\"file\":\"a.py\",\"lines\":[\"b = a + 1\"]}]}\n```"),
            expected);
  EXPECT_EQ(kind_of([] { parse_slice_response("I think the slice is obvious."); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_slice_response("```python\nx = 1\n```"); }), ErrorKind::ParseError);
}

TEST(Parse, Expansion) {
  auto ws = make_workspace({{"A.java",
                             "class A {\n  int max(int a) { return a; }\n  int max(int a, int b) { return b; }\n}\n",
                             std::nullopt}});
  auto catalog = list_project_functions(*build_index(ws));
  std::vector<CallSite> calls = {{"max", std::nullopt, 1, "A.java", 2}};
  auto one = parse_expansion_response(R"j({"resolutions":[{"call":"max/1","target":"A.max(int)"}]})j", calls, catalog);
  ASSERT_EQ(one.resolved.size(), 1u);
  EXPECT_EQ(one.resolved[0].second.signature(), "A.max(int)");
  auto ghost = parse_expansion_response(R"j({"resolutions":[{"call":"max/1","target":"B.foo()"}]})j", calls, catalog);
  EXPECT_TRUE(ghost.resolved.empty());
  EXPECT_EQ(ghost.hallucinated, 1);
  auto both = parse_expansion_response(
      R"j({"resolutions":[{"call":"max/1","target":"A.max(int)"},{"call":"max/1","target":"A.max(int, int)"}]})j",
      calls, catalog);
  ASSERT_EQ(both.resolved.size(), 1u);
  EXPECT_EQ(both.resolved[0].second.signature(), "A.max(int)");
  EXPECT_EQ(both.duplicates, 1);
  EXPECT_EQ(kind_of([&] { parse_expansion_response("no idea", calls, catalog); }), ErrorKind::ParseError);
}

TEST(Parse, Completeness) {
  auto c = parse_completeness_response(R"j({"missing":[]})j");
  EXPECT_EQ(c.verdict, Verdict::complete);
  auto i = parse_completeness_response(R"j({"missing":[{"kind":"structural","description":"class header"}]})j");
  EXPECT_EQ(i.verdict, Verdict::incomplete);
  ASSERT_EQ(i.missing.size(), 1u);
  EXPECT_EQ(i.missing[0].kind, MissingKind::structural);
  auto other = parse_completeness_response(R"j({"missing":[{"kind":"weird","description":"x = 1"}]})j");
  EXPECT_EQ(other.missing[0].kind, MissingKind::dependency);
  EXPECT_EQ(kind_of([] { parse_completeness_response("Looks complete to me."); }), ErrorKind::ParseError);
}

TEST(Parse, RoundTripProperties) {
  std::mt19937 rng(11);
  const std::string alphabet = "abcXYZ _=+-*/(){}[]:;,.\"'\\#\t<>!?@$%^&|~`0123";
  auto word = [&] {
    std::string s;
    int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  for (int round = 0; round < 300; ++round) {
    // slice answers
    std::vector<RawLine> lines;
    int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      std::optional<std::string> hint;
      if (rng() % 3) hint = "f" + std::to_string(rng() % 3) + ".py";
      lines.push_back({hint, "x" + word()});
    }
    EXPECT_EQ(parse_slice_response(write_slice_answer(lines)), lines);

    // completeness answers
    std::vector<MissingItem> missing;
    int m = static_cast<int>(rng() % 4);
    for (int i = 0; i < m; ++i) {
      missing.push_back({"d" + word(), rng() % 2 ? MissingKind::structural : MissingKind::dependency});
    }
    auto parsed = parse_completeness_response(write_completeness_answer(missing));
    EXPECT_EQ(parsed.missing, missing);
    EXPECT_EQ(parsed.verdict == Verdict::complete, missing.empty());
  }

  // expansion answers over a generated catalog
  std::vector<FunctionRecord> catalog;
  std::vector<CallSite> calls;
  for (int i = 0; i < 12; ++i) {
    FunctionRecord f;
    f.file = "m.py";
    f.name = "fn" + std::to_string(i);
    f.qualified_name = (i % 2 ? "C." : "") + f.name;
    for (int p = 0; p < i % 3; ++p) f.params.push_back({"p" + std::to_string(p), p ? "int" : ""});
    catalog.push_back(f);
    calls.push_back({f.name, std::nullopt, static_cast<int>(f.params.size()), "m.py", 1});
  }
  for (int round = 0; round < 200; ++round) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::string> expected;
    std::vector<std::string> used;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      if (rng() % 2) continue;
      pairs.emplace_back(calls[i].key(), catalog[i].signature());
      expected.push_back(catalog[i].id());
    }
    auto ans = parse_expansion_response(write_expansion_answer(pairs), calls, catalog);
    std::vector<std::string> got;
    for (const auto& [call, fn] : ans.resolved) got.push_back(fn.id());
    EXPECT_EQ(got, expected);
    EXPECT_EQ(ans.hallucinated, 0);
  }
}
