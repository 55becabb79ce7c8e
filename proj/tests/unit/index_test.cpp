#include <gtest/gtest.h>

#include "agentslice/aci.hpp"
#include "agentslice/error.hpp"
#include "support/helpers.hpp"

using namespace agentslice;
using agentslice::testing::index_of;

namespace {

std::vector<std::string> names(const std::vector<CallSite>& calls) {
  std::vector<std::string> out;
  for (const auto& c : calls) out.push_back(c.key());
  return out;
}

CodeFragment fragment(Language lang, const std::string& file, std::vector<std::string> lines) {
  CodeFragment f{lang, {}};
  int n = 1;
  for (auto& l : lines) f.lines.push_back({file, n++, std::move(l)});
  return f;
}

}  // namespace

TEST(Index, PythonFunction) {
  auto idx = index_of({{"a.py", "def f(a):\n  return a", std::nullopt}});
  ASSERT_EQ(idx->functions().size(), 1u);
  const auto& f = idx->functions()[0];
  EXPECT_EQ(f.name, "f");
  ASSERT_EQ(f.params.size(), 1u);
  EXPECT_EQ(f.params[0].name, "a");
  EXPECT_EQ(f.body_span, (LineSpan{1, 2}));
  EXPECT_FALSE(idx->parse_degraded("a.py"));
}

TEST(Index, JavaMethodWithSupertype) {
  auto idx = index_of({{"A.java", "class A extends B { void m(int x){} }", std::nullopt}});
  ASSERT_EQ(idx->functions().size(), 1u);
  const auto& m = idx->functions()[0];
  EXPECT_EQ(m.qualified_name, "A.m");
  EXPECT_EQ(m.params, (std::vector<Parameter>{{"x", "int"}}));
  EXPECT_EQ(m.supertypes, (std::vector<std::string>{"B"}));
  EXPECT_EQ(m.kind, FunctionKind::method);
  EXPECT_EQ(m.signature(), "A.m(int)");
}

TEST(Index, BrokenFileIsDegradedNotRejected) {
  auto idx = index_of({{"A.java", "class A {\n  void m() {\n    int x = 1;\n", std::nullopt}});
  EXPECT_TRUE(idx->parse_degraded("A.java"));
  for (const auto& f : idx->functions()) {
    EXPECT_LE(f.body_span.start, f.body_span.end);
    EXPECT_LE(f.body_span.end, 3);
  }
}

TEST(Index, Deterministic) {
  std::vector<FileEntry> files = {
      {"A.java", "import java.util.*;\nclass A { int f; void m(){ f = 1; } }\n", std::nullopt},
      {"b.py", "G = 0\ndef s():\n    global G\n    G = 2\n", std::nullopt}};
  auto a = index_of(files);
  auto b = index_of(files);
  EXPECT_TRUE(*a == *b);
}

TEST(Aci, CriterionScope) {
  auto idx = index_of({{"a.py", "import sys\ndef f(a):\n  b=a+1\n  print(b)\nf(3)\n", std::nullopt}});
  const auto& ws = idx->workspace();
  EXPECT_EQ(criterion_scope(*idx, make_criterion(ws, "a.py", 4)).span, (LineSpan{2, 4}));
  auto top = criterion_scope(*idx, make_criterion(ws, "a.py", 5));
  EXPECT_EQ(top.span, (LineSpan{1, 5}));
  EXPECT_EQ(top.role, RegionRole::criterion_scope);
  SlicingCriterion bad{"a.py", 99, {}, ""};
  EXPECT_THROW(criterion_scope(*idx, bad), Error);
}

TEST(Aci, InvocationsPython) {
  auto idx = index_of({{"a.py", "def maxv(a):\n    return a\n", std::nullopt}});
  auto calls = extract_invocations(*idx, fragment(Language::python, "a.py", {"y = maxv(a); print(y)"}));
  EXPECT_EQ(names(calls), (std::vector<std::string>{"maxv/1"}));
  EXPECT_TRUE(extract_invocations(*idx, fragment(Language::python, "a.py", {"x = 1"})).empty());
}

TEST(Aci, InvocationsJava) {
  auto idx = index_of({{"A.java", "class A { int max(int a, int b) { return a; } }\n", std::nullopt}});
  auto calls = extract_invocations(
      *idx, fragment(Language::java, "A.java", {"System.out.println(x); this.max(a,b);"}));
  ASSERT_EQ(calls.size(), 1u);
  EXPECT_EQ(calls[0].callee_name, "max");
  EXPECT_EQ(calls[0].receiver_hint, std::optional<std::string>("this"));
  EXPECT_EQ(calls[0].arity, 2);
}

TEST(Aci, InvocationsFromBrokenFragment) {
  auto idx = index_of({{"a.py", "def g(x):\n    return x\ndef h():\n    pass\n", std::nullopt}});
  auto calls = extract_invocations(
      *idx, fragment(Language::python, "a.py",
                     {"    if g(h()) > 1:", "        y = g(2)", "  else:", "    z = len(g(3))"}));
  EXPECT_EQ(names(calls), (std::vector<std::string>{"g/1", "h/0", "g/1", "g/1"}));
  EXPECT_EQ(calls[2].line, 2);
}

TEST(Aci, ShadowedBuiltinKept) {
  auto idx = index_of({{"a.py", "def len(x):\n    return 0\n", std::nullopt}});
  auto calls = extract_invocations(*idx, fragment(Language::python, "a.py", {"n = len(v) + abs(n)"}));
  EXPECT_EQ(names(calls), (std::vector<std::string>{"len/1"}));
}

TEST(Aci, Overloads) {
  auto idx = index_of({{"A.java",
                        "class A {\n  int max(int a) { return a; }\n  int max(int a, int b) { return b; }\n}\n",
                        std::nullopt}});
  auto fns = list_project_functions(*idx);
  ASSERT_EQ(fns.size(), 2u);
  EXPECT_NE(fns[0].id(), fns[1].id());
}

TEST(Aci, NoFunctions) {
  auto idx = index_of({{"a.py", "x = 1\nprint(x)\n", std::nullopt}});
  EXPECT_TRUE(list_project_functions(*idx).empty());
}

TEST(Aci, ModuleContextLocalsOnly) {
  auto idx = index_of({{"A.java",
                        "package p;\nimport java.util.List;\nclass A {\n  void m() {\n    int x = 1;\n"
                        "    System.out.println(x);\n  }\n}\n",
                        std::nullopt}});
  auto regions = module_context(*idx, {{"A.java", 5}, {"A.java", 6}});
  std::vector<CodeRegion> expected = {{"A.java", {1, 3}, RegionRole::structural}};
  EXPECT_EQ(regions, expected);
}

TEST(Aci, ModuleContextCrossFile) {
  auto idx = index_of({{"file1.py", "from file2 import *\ndef main():\n    print(G)\n", std::nullopt},
                       {"file2.py", "G = 0\n\ndef set_g(v):\n    global G\n    G = v\n", std::nullopt}});
  auto regions = module_context(*idx, {{"file1.py", 3}});
  std::vector<CodeRegion> expected = {{"file1.py", {1, 1}, RegionRole::structural},
                                      {"file2.py", {1, 1}, RegionRole::global_decl},
                                      {"file2.py", {3, 5}, RegionRole::function_body}};
  EXPECT_EQ(regions, expected);
}

TEST(Aci, ModuleContextSubtractsCovered) {
  auto idx = index_of({{"m.py", "G = [0]\ndef upd():\n    G[0] = 1\n    return 2\n", std::nullopt}});
  auto regions = module_context(*idx, {{"m.py", 3}}, {{"m.py", {2, 3}, RegionRole::criterion_scope}});
  std::vector<CodeRegion> expected = {{"m.py", {1, 1}, RegionRole::global_decl},
                                      {"m.py", {4, 4}, RegionRole::function_body}};
  EXPECT_EQ(regions, expected);
}

TEST(Aci, NormalizeMergesOverlapsWithStrongerRole) {
  auto ws = load_workspace({{"a.py", "1\n2\n3\n4\n5\n6\n", std::nullopt}});
  auto out = normalize_regions(ws, {{"a.py", {3, 5}, RegionRole::structural},
                                    {"a.py", {1, 3}, RegionRole::function_body},
                                    {"a.py", {6, 6}, RegionRole::global_decl}});
  std::vector<CodeRegion> expected = {{"a.py", {1, 5}, RegionRole::function_body},
                                      {"a.py", {6, 6}, RegionRole::global_decl}};
  EXPECT_EQ(out, expected);
}
