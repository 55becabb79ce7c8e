#pragma once

// Line-level lexical helpers shared by the index, the aligner and the scorer.
// They never build a syntax tree; strings and comments are skipped with a
// small hand-written scanner.

#include <string>
#include <string_view>
#include <vector>

#include "agentslice/workspace.hpp"

namespace agentslice::lexical {

struct IdentifierToken {
  std::string text;
  bool followed_by_call = false;  // next non-space char is '('
  bool after_dot = false;         // previous non-space char is '.'
};

/// Identifiers on one line, outside string literals and comments.
std::vector<IdentifierToken> identifiers(std::string_view line, Language lang);

bool is_keyword(std::string_view word, Language lang);
/// Python built-in function names (language reference list).
bool is_python_builtin(std::string_view word);
/// Receivers and well-known library names that never denote slice variables.
bool is_builtin_name(std::string_view word, Language lang);

/// D4: all identifiers on the statement minus keywords, built-ins, callees and
/// library qualifiers, in first-occurrence order.
std::vector<std::string> criterion_variables(std::string_view statement, Language lang);

/// Removes a trailing line comment (`//` or `#`), respecting string literals.
std::string strip_line_comment(std::string_view line, Language lang);

/// Per-line flag: the line holds only comment text (or is inside a Java block
/// comment). Blank lines are not comment-only.
std::vector<bool> comment_only_lines(const SourceFile& file);

}  // namespace agentslice::lexical
