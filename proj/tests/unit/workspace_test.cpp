#include <gtest/gtest.h>

#include <fstream>

#include "agentslice/error.hpp"
#include "agentslice/lexical.hpp"
#include "agentslice/workspace.hpp"
#include "support/helpers.hpp"

using namespace agentslice;
using agentslice::testing::temp_dir;

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

}  // namespace

TEST(Workspace, SingleFile) {
  auto ws = load_workspace({{"a.py", "x=1\n", std::nullopt}});
  ASSERT_EQ(ws.files().size(), 1u);
  EXPECT_EQ(ws.files()[0].language(), Language::python);
  EXPECT_EQ(ws.files()[0].line_count(), 1);
}

TEST(Workspace, Rejections) {
  EXPECT_EQ(kind_of([] {
              load_workspace({{"A.java", "class A {}", std::nullopt},
                              {"A.java", "class A {}", std::nullopt}});
            }),
            ErrorKind::DuplicatePath);
  EXPECT_EQ(kind_of([] { load_workspace({{"m.txt", "x", std::nullopt}}); }),
            ErrorKind::UnsupportedLanguage);
  EXPECT_EQ(kind_of([] { load_workspace({}); }), ErrorKind::EmptyWorkspace);
}

TEST(Workspace, LanguageOverride) {
  auto ws = load_workspace({{"script", "print(1)\n", Language::python}});
  EXPECT_EQ(ws.files()[0].language(), Language::python);
}

TEST(Workspace, ReconstructionIsByteIdentical) {
  for (std::string text : {"", "a", "a\n", "a\n\nb", "a\r\nb\r\n", "\n\n", "x = 1\n  y\t= 2\n"}) {
    SourceFile f("f.py", Language::python, text);
    EXPECT_EQ(f.reconstruct(), text);
    EXPECT_GE(f.line_count(), 1);
  }
}

TEST(Workspace, ResolveHint) {
  auto ws = load_workspace({{"src/pkg/Main.java", "class Main {}\n", std::nullopt},
                            {"src/pkg/Util.java", "class Util {}\n", std::nullopt},
                            {"other/Util.java", "class Util {}\n", std::nullopt}});
  ASSERT_NE(ws.resolve_hint("Main.java"), nullptr);
  EXPECT_EQ(ws.resolve_hint("Main.java")->path(), "src/pkg/Main.java");
  EXPECT_EQ(ws.resolve_hint("/abs/src/pkg/Main.java")->path(), "src/pkg/Main.java");
  EXPECT_EQ(ws.resolve_hint("Util.java"), nullptr);  // ambiguous
  EXPECT_EQ(ws.resolve_hint("pkg/Util.java")->path(), "src/pkg/Util.java");
  EXPECT_EQ(ws.resolve_hint("ain.java"), nullptr);
}

TEST(Workspace, DirectoryScanSkipsBinaryAndLarge) {
  auto dir = temp_dir("scan");
  std::filesystem::create_directories(dir / "pkg");
  std::ofstream(dir / "pkg" / "b.py") << "y = 2\n";
  std::ofstream(dir / "a.py") << "x = 1\n";
  std::ofstream(dir / "notes.txt") << "ignored\n";
  {
    std::ofstream bin(dir / "bin.py", std::ios::binary);
    bin << std::string("ab\0cd", 5);
  }
  std::ofstream(dir / "big.py") << std::string(300, 'x');
  std::vector<std::string> warnings;
  ScanOptions opts;
  opts.max_file_bytes = 100;
  auto ws = load_workspace_dir(dir, &warnings, opts);
  ASSERT_EQ(ws.files().size(), 2u);
  EXPECT_EQ(ws.files()[0].path(), "a.py");
  EXPECT_EQ(ws.files()[1].path(), "pkg/b.py");
  EXPECT_EQ(warnings.size(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(Workspace, CriterionVariablesFromStatement) {
  auto ws = load_workspace({{"a.py", "a = 1\nprint(a + b.c)\n", std::nullopt},
                            {"Main.java", "class Main {\n  void m() { System.out.println(list[0] + n); }\n}\n",
                             std::nullopt}});
  auto c = make_criterion(ws, "a.py", 2);
  EXPECT_EQ(c.statement_text, "print(a + b.c)");
  EXPECT_EQ(c.variables, (std::vector<std::string>{"a", "b", "c"}));
  auto j = make_criterion(ws, "Main.java", 2);
  EXPECT_EQ(j.variables, (std::vector<std::string>{"list", "n"}));
  auto given = make_criterion(ws, "a.py", 1, {"a"});
  EXPECT_EQ(given.variables, (std::vector<std::string>{"a"}));
  EXPECT_EQ(kind_of([&] { make_criterion(ws, "a.py", 9); }), ErrorKind::CriterionNotFound);
  EXPECT_EQ(kind_of([&] { make_criterion(ws, "zz.py", 1); }), ErrorKind::CriterionNotFound);
}

TEST(Lexical, IdentifiersSkipStringsAndComments) {
  auto ids = lexical::identifiers("x = f('y z') # w", Language::python);
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(ids[0].text, "x");
  EXPECT_EQ(ids[1].text, "f");
  EXPECT_TRUE(ids[1].followed_by_call);
  auto j = lexical::identifiers("a.b = \"c\"; // d", Language::java);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_TRUE(j[1].after_dot);
}

TEST(Lexical, CommentOnlyLines) {
  SourceFile f("A.java", Language::java, "// c\nint x; /* a\n b\n */ int y;\n\n");
  auto flags = lexical::comment_only_lines(f);
  EXPECT_EQ(flags, (std::vector<bool>{true, false, true, false, false}));
}
