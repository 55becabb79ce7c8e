#include "agentslice/syntax_index.hpp"

#include <algorithm>
#include <cctype>

#include "extract.hpp"
#include "ts_tree.hpp"

namespace agentslice {

std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::function: return "function";
    case FunctionKind::method: return "method";
    case FunctionKind::constructor: return "constructor";
  }
  return "function";
}

std::string FunctionRecord::signature() const {
  std::string out = qualified_name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].declared_type.empty() ? params[i].name : params[i].declared_type;
  }
  return out + ")";
}

std::string FunctionRecord::id() const { return file + "::" + signature(); }

namespace detail {

std::string join_chain(const std::vector<std::string>& chain, const std::string& leaf) {
  std::string out;
  for (const auto& part : chain) {
    out += part;
    out += '.';
  }
  return out + leaf;
}

bool is_class_like_name(std::string_view word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word[0]));
}

}  // namespace detail

SyntaxIndex::SyntaxIndex(std::shared_ptr<const Workspace> workspace, std::vector<FileInfo> files,
                         std::vector<FunctionRecord> functions, std::vector<ClassRecord> classes,
                         std::vector<VariableDecl> variables,
                         std::vector<StructuralDecl> structurals,
                         std::vector<VariableWrite> writes,
                         std::vector<std::pair<std::string, LineSpan>> blocks)
    : workspace_(std::move(workspace)),
      files_(std::move(files)),
      functions_(std::move(functions)),
      classes_(std::move(classes)),
      variables_(std::move(variables)),
      structurals_(std::move(structurals)),
      writes_(std::move(writes)),
      blocks_(std::move(blocks)) {}

const FileInfo* SyntaxIndex::file_info(std::string_view path) const {
  for (const auto& f : files_) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

bool SyntaxIndex::parse_degraded(std::string_view path) const {
  const auto* info = file_info(path);
  return info && info->parse_degraded;
}

std::optional<std::size_t> SyntaxIndex::function_index(std::string_view id) const {
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i].id() == id) return i;
  }
  return std::nullopt;
}

const FunctionRecord* SyntaxIndex::find_function(std::string_view id) const {
  auto i = function_index(id);
  return i ? &functions_[*i] : nullptr;
}

std::optional<std::size_t> SyntaxIndex::enclosing_function_index(std::string_view file,
                                                                 int line) const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    const auto& f = functions_[i];
    if (f.lambda || f.file != file || !f.body_span.contains(line)) continue;
    if (!best || f.body_span.length() <= functions_[*best].body_span.length()) best = i;
  }
  return best;
}

const FunctionRecord* SyntaxIndex::enclosing_function(std::string_view file, int line) const {
  auto i = enclosing_function_index(file, line);
  return i ? &functions_[*i] : nullptr;
}

const ClassRecord* SyntaxIndex::enclosing_class(std::string_view file, int line) const {
  const ClassRecord* best = nullptr;
  for (const auto& c : classes_) {
    if (c.file != file || !c.span.contains(line)) continue;
    if (!best || c.span.length() <= best->span.length()) best = &c;
  }
  return best;
}

bool SyntaxIndex::operator==(const SyntaxIndex& other) const {
  return files_ == other.files_ && functions_ == other.functions_ &&
         classes_ == other.classes_ && variables_ == other.variables_ &&
         structurals_ == other.structurals_ && writes_ == other.writes_ &&
         blocks_ == other.blocks_;
}

std::shared_ptr<const SyntaxIndex> build_index(std::shared_ptr<const Workspace> workspace) {
  std::vector<FileInfo> files;
  std::vector<FunctionRecord> functions;
  std::vector<ClassRecord> classes;
  std::vector<VariableDecl> variables;
  std::vector<StructuralDecl> structurals;
  std::vector<VariableWrite> writes;
  std::vector<std::pair<std::string, LineSpan>> blocks;

  for (const auto& file : workspace->files()) {
    ts::Tree tree(file.language(), file.text());
    files.push_back({file.path(), file.language(), tree.has_error()});
    auto records = file.language() == Language::java ? detail::extract_java(file, tree)
                                                      : detail::extract_python(file, tree);
    std::size_t offset = functions.size();
    for (auto& f : records.functions) {
      // Spans are clamped to the file so degraded parses stay well-formed.
      f.body_span.start = std::clamp(f.body_span.start, 1, file.line_count());
      f.body_span.end = std::clamp(f.body_span.end, f.body_span.start, file.line_count());
      functions.push_back(std::move(f));
    }
    for (auto& w : records.writes) writes.push_back({w.function + offset, std::move(w.name), w.line});
    std::move(records.classes.begin(), records.classes.end(), std::back_inserter(classes));
    std::move(records.variables.begin(), records.variables.end(), std::back_inserter(variables));
    std::move(records.structurals.begin(), records.structurals.end(),
              std::back_inserter(structurals));
    for (auto& b : records.blocks) blocks.emplace_back(file.path(), b);
  }
  return std::make_shared<const SyntaxIndex>(std::move(workspace), std::move(files),
                                             std::move(functions), std::move(classes),
                                             std::move(variables), std::move(structurals),
                                             std::move(writes), std::move(blocks));
}

}  // namespace agentslice
