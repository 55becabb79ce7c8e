#include <gtest/gtest.h>

#include <random>

#include "agentslice/error.hpp"
#include "agentslice/scope.hpp"
#include "agentslice/slice.hpp"
#include "support/corpus.hpp"
#include "support/helpers.hpp"

using namespace agentslice;
using agentslice::testing::make_workspace;

namespace {

std::shared_ptr<const Workspace> numbered(int n, std::string path = "a.py") {
  std::string text;
  for (int i = 1; i <= n; ++i) text += "v" + std::to_string(i) + " = " + std::to_string(i) + "\n";
  return make_workspace({{path, text, std::nullopt}});
}

Slice random_slice(const Workspace& ws, const SlicingCriterion& c, std::mt19937& rng) {
  Slice s(c);
  for (const auto& f : ws.files()) {
    for (int n = 1; n <= f.line_count(); ++n) {
      if (rng() % 3 == 0) s.insert({f.path(), n, f.line(n)});
    }
  }
  return s;
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_line("  b = a + 1  "), "b = a + 1");
  EXPECT_EQ(normalize_line("}"), "");
  EXPECT_TRUE(is_non_semantic("}"));
  EXPECT_EQ(normalize_line("x=f( a,\tb )"), "x=f( a, b )");
  EXPECT_TRUE(is_non_semantic("  ); // done", Language::java));
  EXPECT_TRUE(is_non_semantic("/* */ {"));
  EXPECT_FALSE(is_non_semantic("else:", Language::python));
  EXPECT_FALSE(is_non_semantic("x"));
}

TEST(Align, UniqueMatch) {
  auto ws = make_workspace({{"a.py", "a = 1\nx = 0\nb = a + 1\nprint(b)\n", std::nullopt}});
  LineLocator loc(*ws);
  auto c = make_criterion(*ws, "a.py", 4);
  auto [slice, report] = align_text_to_slice({{std::nullopt, "b = a + 1"}}, loc, nullptr, nullptr, c);
  EXPECT_TRUE(slice.contains("a.py", 3));
  EXPECT_TRUE(slice.contains("a.py", 4));  // criterion appended
  EXPECT_EQ(slice.size(), 2u);
  EXPECT_EQ(report.ambiguous_resolved, 0);
}

TEST(Align, NearestToPreviousAlignedLine) {
  std::string text;
  for (int i = 1; i <= 45; ++i) {
    if (i == 4 || i == 40) {
      text += "count += 1\n";
    } else {
      text += "v" + std::to_string(i) + " = 0\n";
    }
  }
  auto ws = make_workspace({{"a.py", text, std::nullopt}});
  LineLocator loc(*ws);
  auto c = make_criterion(*ws, "a.py", 45);
  auto [slice, report] = align_text_to_slice({{std::nullopt, "v5 = 0"}, {std::nullopt, "count += 1"}},
                                             loc, nullptr, nullptr, c);
  EXPECT_TRUE(slice.contains("a.py", 4));
  EXPECT_FALSE(slice.contains("a.py", 40));
  EXPECT_EQ(report.ambiguous_resolved, 1);
}

TEST(Align, InScopeWinsOverDistance) {
  auto ws = make_workspace({{"a.py", "x = 1\ny = 2\nx = 1\nz = 3\nprint(x)\n", std::nullopt}});
  LineLocator loc(*ws);
  SearchScope scope(ws);
  scope.add(CodeRegion{"a.py", {3, 5}, RegionRole::criterion_scope});
  auto c = make_criterion(*ws, "a.py", 5);
  auto [slice, report] =
      align_text_to_slice({{std::nullopt, "y = 2"}, {std::nullopt, "x = 1"}}, loc, &scope, nullptr, c);
  EXPECT_TRUE(slice.contains("a.py", 3));
  EXPECT_FALSE(slice.contains("a.py", 1));
}

TEST(Align, SmallestLineOnFullTie) {
  auto ws = make_workspace({{"a.py", "x = 1\nx = 1\nprint(x)\n", std::nullopt}});
  LineLocator loc(*ws);
  auto c = make_criterion(*ws, "a.py", 3);
  auto [slice, report] = align_text_to_slice({{std::nullopt, "x = 1"}}, loc, nullptr, nullptr, c);
  EXPECT_TRUE(slice.contains("a.py", 1));
  // A second copy goes to the other occurrence.
  auto [two, r2] = align_text_to_slice({{std::nullopt, "x = 1"}, {std::nullopt, "x = 1"}}, loc,
                                       nullptr, nullptr, c);
  EXPECT_EQ(two.size(), 3u);
}

TEST(Align, HallucinationsDropped) {
  auto ws = make_workspace({{"a.py", "a = 1\nb = a + 1\nprint(b)\n", std::nullopt}});
  LineLocator loc(*ws);
  auto c = make_criterion(*ws, "a.py", 3);
  auto [slice, report] = align_text_to_slice(
      {{std::nullopt, "b = a + 2"}, {std::nullopt, "   "}, {std::nullopt, "a = 1"}}, loc, nullptr,
      nullptr, c);
  ASSERT_EQ(report.hallucinated.size(), 1u);
  EXPECT_EQ(report.hallucinated[0].text, "b = a + 2");
  EXPECT_EQ(report.aligned.size(), 1u);  // blank lines belong to neither list
  EXPECT_EQ(slice.size(), 2u);
  EXPECT_THROW(align_text_to_slice({{std::nullopt, "nope"}}, loc, nullptr, nullptr, c), Error);
}

TEST(Align, HintSelectsFile) {
  auto ws = make_workspace({{"a.py", "x = 1\nprint(x)\n", std::nullopt},
                            {"pkg/b.py", "x = 1\n", std::nullopt}});
  LineLocator loc(*ws);
  auto c = make_criterion(*ws, "a.py", 2);
  auto [slice, report] = align_text_to_slice({{"b.py", "x = 1"}}, loc, nullptr, nullptr, c);
  EXPECT_TRUE(slice.contains("pkg/b.py", 1));
}

TEST(Align, CommentDifferencesTolerated) {
  auto ws = make_workspace({{"A.java", "int x = 1; // init\nint y = x;\n", std::nullopt}});
  LineLocator loc(*ws);
  auto c = make_criterion(*ws, "A.java", 2);
  auto [slice, report] = align_text_to_slice({{std::nullopt, "int x=1;"}}, loc, nullptr, nullptr, c);
  EXPECT_TRUE(slice.contains("A.java", 1));
}

TEST(Align, AllowedPredicateRejects) {
  auto ws = make_workspace({{"a.py", "a = 1\nb = 2\nprint(a)\n", std::nullopt}});
  LineLocator loc(*ws);
  auto c = make_criterion(*ws, "a.py", 3);
  AlignOptions opts;
  opts.allowed = [](const std::string&, int line) { return line != 2; };
  auto [slice, report] = align_text_to_slice({{std::nullopt, "a = 1"}, {std::nullopt, "b = 2"}}, loc,
                                             nullptr, nullptr, c, opts);
  EXPECT_FALSE(slice.contains("a.py", 2));
  EXPECT_EQ(report.rejected.size(), 1u);
  EXPECT_EQ(report.hallucinated.size(), 1u);
}

TEST(Align, WhitespaceFuzz) {
  auto outcome = agentslice::testing::alignment_fuzz(500, 20241018u);
  EXPECT_EQ(outcome.failures, 0) << outcome.first_failure;
}

TEST(Align, DuplicatesAlwaysAlignToEqualText) {
  auto ws = make_workspace(agentslice::testing::property_corpus());
  LineLocator loc(*ws);
  std::mt19937 rng(7);
  auto c = make_criterion(*ws, "tools/calc.py", 25);
  for (int round = 0; round < 200; ++round) {
    std::vector<RawLine> raw;
    std::vector<std::string> texts;
    for (const auto& f : ws->files()) {
      for (int n = 1; n <= f.line_count(); ++n) {
        if (rng() % 4 != 0 || f.line(n).empty()) continue;
        raw.push_back({f.path(), agentslice::testing::mutate_whitespace(f.line(n), rng)});
      }
    }
    if (raw.empty()) continue;
    auto [slice, report] = align_text_to_slice(raw, loc, nullptr, nullptr, c);
    EXPECT_TRUE(report.hallucinated.empty());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto strip = [](std::string s) { std::erase_if(s, [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }); return s; };
      EXPECT_EQ(strip(report.aligned[i].text), strip(raw[i].text));
    }
  }
}

TEST(Merge, Examples) {
  auto ws = make_workspace({{"a.py", "x = 1\nprint(x)\n", std::nullopt},
                            {"b.py", "1\n2\n3\n4\n5\n6\n7\n", std::nullopt}});
  auto c = make_criterion(*ws, "a.py", 2);
  Slice s(c);
  s.insert({"a.py", 1, "x = 1"});
  EXPECT_EQ(merge_slices(s, s), s);
  EXPECT_EQ(merge_slices(s, Slice(c)), s);
  Slice t(c);
  t.insert({"b.py", 7, "7"});
  auto m = merge_slices(s, t);
  auto refs = m.refs();
  std::vector<std::pair<std::string, int>> expected = {{"a.py", 1}, {"a.py", 2}, {"b.py", 7}};
  EXPECT_EQ(refs, expected);
  Slice other(make_criterion(*ws, "a.py", 1));
  EXPECT_THROW(merge_slices(s, other), Error);
}

TEST(Merge, AlgebraicProperties) {
  auto ws = numbered(30);
  auto c = make_criterion(*ws, "a.py", 30);
  std::mt19937 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto a = random_slice(*ws, c, rng);
    auto b = random_slice(*ws, c, rng);
    auto d = random_slice(*ws, c, rng);
    EXPECT_EQ(merge_slices(a, b), merge_slices(b, a));
    EXPECT_EQ(merge_slices(merge_slices(a, b), d), merge_slices(a, merge_slices(b, d)));
    EXPECT_EQ(merge_slices(a, a), a);
  }
}

TEST(Slice, CriterionCannotBeErased) {
  auto ws = numbered(3);
  Slice s(make_criterion(*ws, "a.py", 3));
  EXPECT_FALSE(s.erase("a.py", 3));
  EXPECT_TRUE(s.contains("a.py", 3));
}

TEST(Slice, JsonRoundTrip) {
  auto ws = numbered(10);
  auto c = make_criterion(*ws, "a.py", 9, {"v9"});
  std::mt19937 rng(3);
  auto s = random_slice(*ws, c, rng);
  auto j = slice_to_json(s, {{"a.py", "ghost"}}, std::string("ParseError: x"));
  EXPECT_EQ(j["error"], "ParseError: x");
  EXPECT_EQ(j["hallucinated"][0]["text"], "ghost");
  EXPECT_EQ(slice_from_json(j, *ws), s);
  j["lines"].push_back({{"file", "a.py"}, {"line", 99}, {"text", "?"}});
  try {
    slice_from_json(j, *ws);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    EXPECT_NE(std::string(e.what()).find("/lines/"), std::string::npos);
  }
}

TEST(Scope, MergesAndRendersWithHeaders) {
  auto ws = make_workspace({{"a.py", "1\n2\n3\n4\n5\n6\n", std::nullopt},
                            {"b.py", "x\ny\n", std::nullopt}});
  SearchScope scope(ws);
  EXPECT_TRUE(scope.add(CodeRegion{"b.py", {2, 2}, RegionRole::criterion_scope}));
  EXPECT_TRUE(scope.add({{"a.py", {1, 2}, RegionRole::function_body},
                         {"a.py", {5, 6}, RegionRole::function_body}}));
  EXPECT_FALSE(scope.add(CodeRegion{"a.py", {2, 2}, RegionRole::structural}));
  EXPECT_EQ(scope.generation(), 2);
  EXPECT_EQ(scope.render(), "=== File: b.py ===\ny\n\n=== File: a.py ===\n1\n2\n...\n5\n6\n");
  EXPECT_TRUE(scope.contains("a.py", 5));
  EXPECT_FALSE(scope.contains("a.py", 3));
  EXPECT_EQ(scope.line_count(), 5u);
}
