#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentslice/workspace.hpp"

namespace agentslice {

/// Inclusive 1-based line range.
struct LineSpan {
  int start = 0;
  int end = 0;

  bool contains(int line) const noexcept { return line >= start && line <= end; }
  bool contains(const LineSpan& other) const noexcept {
    return other.start >= start && other.end <= end;
  }
  int length() const noexcept { return end - start + 1; }
  auto operator<=>(const LineSpan&) const = default;
};

enum class FunctionKind { function, method, constructor };
std::string_view to_string(FunctionKind kind);

struct Parameter {
  std::string name;
  std::string declared_type;  // empty when untyped
  bool operator==(const Parameter&) const = default;
};

struct FunctionRecord {
  std::string file;
  std::string qualified_name;  // enclosing class chain + name
  std::string name;
  std::vector<Parameter> params;
  std::vector<std::string> supertypes;  // of the enclosing class
  LineSpan body_span;
  FunctionKind kind = FunctionKind::function;
  bool lambda = false;  // synthetic `lambda@<line>` record

  /// `qualified_name(T1, T2)`; untyped parameters contribute their name.
  std::string signature() const;
  /// `file::signature`, unique within an index.
  std::string id() const;
  bool operator==(const FunctionRecord&) const = default;
};

struct ClassRecord {
  std::string file;
  std::string qualified_name;
  std::string name;
  std::vector<std::string> supertypes;
  LineSpan span;
  LineSpan header;
  bool operator==(const ClassRecord&) const = default;
};

/// Global (module-level) or member (class field / attribute) declaration.
struct VariableDecl {
  std::string file;
  std::string name;
  std::string owner;  // qualified class name, empty for module globals
  LineSpan span;
  bool operator==(const VariableDecl&) const = default;
};

enum class StructuralKind { package, import, class_header };

struct StructuralDecl {
  std::string file;
  LineSpan span;
  StructuralKind kind = StructuralKind::import;
  bool operator==(const StructuralDecl&) const = default;
};

/// A function body assigning a global or member name (simple-name based).
struct VariableWrite {
  std::size_t function = 0;  // index into SyntaxIndex::functions()
  std::string name;
  int line = 0;
  bool operator==(const VariableWrite&) const = default;
};

struct FileInfo {
  std::string path;
  Language language = Language::python;
  bool parse_degraded = false;
  bool operator==(const FileInfo&) const = default;
};

/// Extracted syntax records for a whole workspace. Built once and never
/// mutated; the parser's trees are discarded after extraction.
class SyntaxIndex {
 public:
  SyntaxIndex(std::shared_ptr<const Workspace> workspace, std::vector<FileInfo> files,
              std::vector<FunctionRecord> functions, std::vector<ClassRecord> classes,
              std::vector<VariableDecl> variables, std::vector<StructuralDecl> structurals,
              std::vector<VariableWrite> writes, std::vector<std::pair<std::string, LineSpan>> blocks);

  const Workspace& workspace() const noexcept { return *workspace_; }
  std::shared_ptr<const Workspace> workspace_ptr() const noexcept { return workspace_; }

  const std::vector<FileInfo>& files() const noexcept { return files_; }
  const std::vector<FunctionRecord>& functions() const noexcept { return functions_; }
  const std::vector<ClassRecord>& classes() const noexcept { return classes_; }
  const std::vector<VariableDecl>& variables() const noexcept { return variables_; }
  const std::vector<StructuralDecl>& structurals() const noexcept { return structurals_; }
  const std::vector<VariableWrite>& writes() const noexcept { return writes_; }
  /// Free-standing blocks outside functions (Java initializers).
  const std::vector<std::pair<std::string, LineSpan>>& blocks() const noexcept { return blocks_; }

  const FileInfo* file_info(std::string_view path) const;
  bool parse_degraded(std::string_view path) const;
  const FunctionRecord* find_function(std::string_view id) const;
  std::optional<std::size_t> function_index(std::string_view id) const;
  /// Innermost named (non-lambda) function whose span contains the line.
  const FunctionRecord* enclosing_function(std::string_view file, int line) const;
  std::optional<std::size_t> enclosing_function_index(std::string_view file, int line) const;
  const ClassRecord* enclosing_class(std::string_view file, int line) const;

  bool operator==(const SyntaxIndex& other) const;

 private:
  std::shared_ptr<const Workspace> workspace_;
  std::vector<FileInfo> files_;
  std::vector<FunctionRecord> functions_;
  std::vector<ClassRecord> classes_;
  std::vector<VariableDecl> variables_;
  std::vector<StructuralDecl> structurals_;
  std::vector<VariableWrite> writes_;
  std::vector<std::pair<std::string, LineSpan>> blocks_;
};

/// Parses every file with tree-sitter and extracts records. Files with syntax
/// errors are indexed best-effort and flagged `parse_degraded`.
std::shared_ptr<const SyntaxIndex> build_index(std::shared_ptr<const Workspace> workspace);

}  // namespace agentslice
