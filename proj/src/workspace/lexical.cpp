#include "agentslice/lexical.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace agentslice::lexical {

namespace {

const std::unordered_set<std::string_view>& java_keywords() {
  static const std::unordered_set<std::string_view> kw = {
      "abstract", "assert",     "boolean",  "break",     "byte",      "case",
      "catch",    "char",       "class",    "const",     "continue",  "default",
      "do",       "double",     "else",     "enum",      "extends",   "final",
      "finally",  "float",      "for",      "goto",      "if",        "implements",
      "import",   "instanceof", "int",      "interface", "long",      "native",
      "new",      "package",    "private",  "protected", "public",    "return",
      "short",    "static",     "strictfp", "super",     "switch",    "synchronized",
      "this",     "throw",      "throws",   "transient", "try",       "void",
      "volatile", "while",      "true",     "false",     "null",      "var",
      "record",   "yield",      "sealed",   "permits"};
  return kw;
}

const std::unordered_set<std::string_view>& python_keywords() {
  static const std::unordered_set<std::string_view> kw = {
      "False",  "None",     "True",  "and",   "as",       "assert", "async",
      "await",  "break",    "class", "continue", "def",   "del",    "elif",
      "else",   "except",   "finally", "for", "from",     "global", "if",
      "import", "in",       "is",    "lambda", "nonlocal", "not",  "or",
      "pass",   "raise",    "return", "try",  "while",    "with",   "yield"};
  return kw;
}

const std::unordered_set<std::string_view>& python_builtins() {
  static const std::unordered_set<std::string_view> names = {
      "abs",        "aiter",      "all",          "anext",      "any",
      "ascii",      "bin",        "bool",         "breakpoint", "bytearray",
      "bytes",      "callable",   "chr",          "classmethod", "compile",
      "complex",    "delattr",    "dict",         "dir",        "divmod",
      "enumerate",  "eval",       "exec",         "filter",     "float",
      "format",     "frozenset",  "getattr",      "globals",    "hasattr",
      "hash",       "help",       "hex",          "id",         "input",
      "int",        "isinstance", "issubclass",   "iter",       "len",
      "list",       "locals",     "map",          "max",        "memoryview",
      "min",        "next",       "object",       "oct",        "open",
      "ord",        "pow",        "print",        "property",   "range",
      "repr",       "reversed",   "round",        "set",        "setattr",
      "slice",      "sorted",     "staticmethod", "str",        "sum",
      "super",      "tuple",      "type",         "vars",       "zip",
      "__import__"};
  return names;
}

const std::unordered_set<std::string_view>& java_library_names() {
  static const std::unordered_set<std::string_view> names = {
      "System",  "out",     "err",       "in",        "Math",        "String",
      "Integer", "Long",    "Double",    "Float",     "Boolean",     "Character",
      "Byte",    "Short",   "Object",    "Arrays",    "Collections", "Objects",
      "List",    "ArrayList", "Map",     "HashMap",   "Set",         "HashSet",
      "Scanner", "StringBuilder", "println", "print", "printf",      "format",
      "valueOf", "toString", "length",   "size"};
  return names;
}

bool ident_start(unsigned char c, Language lang) {
  return std::isalpha(c) || c == '_' || c >= 0x80 || (lang == Language::java && c == '$');
}

bool ident_char(unsigned char c, Language lang) {
  return ident_start(c, lang) || std::isdigit(c);
}

bool is_python_string_prefix(std::string_view word) {
  std::string lower;
  for (char c : word) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::array<std::string_view, 10> prefixes = {"r", "u", "f", "b", "br", "rb",
                                                            "fr", "rf", "t", "tr"};
  return std::find(prefixes.begin(), prefixes.end(), lower) != prefixes.end();
}

// Skips a string literal starting at `i` (which points at the opening quote).
// Returns the index just past the literal, or line.size() when unterminated.
std::size_t skip_string(std::string_view line, std::size_t i) {
  char q = line[i];
  bool triple = i + 2 < line.size() && line[i + 1] == q && line[i + 2] == q;
  if (triple) {
    auto end = line.find(std::string(3, q), i + 3);
    return end == std::string_view::npos ? line.size() : end + 3;
  }
  for (std::size_t j = i + 1; j < line.size(); ++j) {
    if (line[j] == '\\') {
      ++j;
      continue;
    }
    if (line[j] == q) return j + 1;
  }
  return line.size();
}

enum class Piece { code, string, comment };

// Walks a line and reports code / string / comment byte ranges.
template <typename Fn>
void scan(std::string_view line, Language lang, Fn&& fn) {
  std::size_t i = 0;
  while (i < line.size()) {
    unsigned char c = static_cast<unsigned char>(line[i]);
    if (c == '"' || c == '\'') {
      auto end = skip_string(line, i);
      fn(Piece::string, i, end);
      i = end;
      continue;
    }
    if (lang == Language::python && c == '#') {
      fn(Piece::comment, i, line.size());
      return;
    }
    if (lang == Language::java && c == '/' && i + 1 < line.size()) {
      if (line[i + 1] == '/') {
        fn(Piece::comment, i, line.size());
        return;
      }
      if (line[i + 1] == '*') {
        auto end = line.find("*/", i + 2);
        auto stop = end == std::string_view::npos ? line.size() : end + 2;
        fn(Piece::comment, i, stop);
        i = stop;
        continue;
      }
    }
    if (ident_start(c, lang)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(static_cast<unsigned char>(line[j]), lang)) ++j;
      if (lang == Language::python && j < line.size() && (line[j] == '"' || line[j] == '\'') &&
          is_python_string_prefix(line.substr(i, j - i))) {
        auto end = skip_string(line, j);
        fn(Piece::string, i, end);
        i = end;
        continue;
      }
      fn(Piece::code, i, j);
      i = j;
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_' ||
              line[j] == '.'))
        ++j;
      fn(Piece::code, i, j);
      i = j;
      continue;
    }
    fn(Piece::code, i, i + 1);
    ++i;
  }
}

bool camel_case_type(std::string_view word) {
  if (word.empty() || !std::isupper(static_cast<unsigned char>(word[0]))) return false;
  return std::any_of(word.begin(), word.end(),
                     [](char c) { return std::islower(static_cast<unsigned char>(c)); });
}

}  // namespace

bool is_keyword(std::string_view word, Language lang) {
  return lang == Language::java ? java_keywords().contains(word)
                                : python_keywords().contains(word);
}

bool is_python_builtin(std::string_view word) { return python_builtins().contains(word); }

bool is_builtin_name(std::string_view word, Language lang) {
  if (lang == Language::python) {
    return python_builtins().contains(word) || word == "self" || word == "cls";
  }
  return java_library_names().contains(word);
}

std::vector<IdentifierToken> identifiers(std::string_view line, Language lang) {
  std::vector<IdentifierToken> out;
  char prev_sig = 0;  // previous significant code char
  scan(line, lang, [&](Piece piece, std::size_t begin, std::size_t end) {
    if (piece != Piece::code) {
      prev_sig = piece == Piece::string ? '"' : prev_sig;
      return;
    }
    unsigned char c = static_cast<unsigned char>(line[begin]);
    if (std::isspace(c)) return;
    if (ident_start(c, lang)) {
      IdentifierToken tok;
      tok.text = std::string(line.substr(begin, end - begin));
      tok.after_dot = prev_sig == '.';
      std::size_t k = end;
      while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
      tok.followed_by_call = k < line.size() && line[k] == '(';
      out.push_back(std::move(tok));
      prev_sig = 'a';
      return;
    }
    prev_sig = static_cast<char>(c);
  });
  return out;
}

std::vector<std::string> criterion_variables(std::string_view statement, Language lang) {
  std::vector<std::string> vars;
  bool chain_is_library = false;
  for (const auto& tok : identifiers(statement, lang)) {
    bool library = is_builtin_name(tok.text, lang) && tok.text != "self" && tok.text != "cls";
    if (lang == Language::java && camel_case_type(tok.text)) library = true;
    if (tok.after_dot && chain_is_library) library = true;
    if (!tok.after_dot) chain_is_library = library;
    else chain_is_library = chain_is_library && library;

    if (library || tok.followed_by_call || is_keyword(tok.text, lang)) continue;
    if (is_builtin_name(tok.text, lang)) continue;  // self / cls receivers
    if (std::find(vars.begin(), vars.end(), tok.text) == vars.end()) vars.push_back(tok.text);
  }
  return vars;
}

std::string strip_line_comment(std::string_view line, Language lang) {
  std::string out;
  scan(line, lang, [&](Piece piece, std::size_t begin, std::size_t end) {
    if (piece == Piece::comment) {
      // Keep inline block comments out but preserve spacing between tokens.
      if (end < line.size()) out += ' ';
      return;
    }
    out.append(line.substr(begin, end - begin));
  });
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

std::vector<bool> comment_only_lines(const SourceFile& file) {
  std::vector<bool> flags(static_cast<std::size_t>(file.line_count()), false);
  bool in_block = false;
  for (int n = 1; n <= file.line_count(); ++n) {
    std::string_view line = file.line(n);
    bool has_comment = false;
    bool has_code = false;
    std::size_t i = 0;
    if (file.language() == Language::java && in_block) {
      has_comment = true;
      auto end = line.find("*/");
      if (end == std::string_view::npos) {
        flags[static_cast<std::size_t>(n - 1)] = true;
        continue;
      }
      in_block = false;
      i = end + 2;
    }
    std::string_view rest = line.substr(i);
    scan(rest, file.language(), [&](Piece piece, std::size_t begin, std::size_t end) {
      if (piece == Piece::comment) {
        has_comment = true;
        if (file.language() == Language::java && rest.substr(begin, 2) == "/*" &&
            rest.find("*/", begin + 2) == std::string_view::npos) {
          in_block = true;
        }
        return;
      }
      for (std::size_t k = begin; k < end; ++k) {
        if (!std::isspace(static_cast<unsigned char>(rest[k]))) has_code = true;
      }
    });
    flags[static_cast<std::size_t>(n - 1)] = has_comment && !has_code;
  }
  return flags;
}

}  // namespace agentslice::lexical
