#include "agentslice/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "agentslice/error.hpp"
#include "agentslice/lexical.hpp"

namespace agentslice {

namespace fs = std::filesystem;

std::string_view to_string(Language lang) {
  return lang == Language::java ? "java" : "python";
}

std::optional<Language> parse_language(std::string_view name) {
  if (name == "java") return Language::java;
  if (name == "python" || name == "py") return Language::python;
  return std::nullopt;
}

std::optional<Language> language_from_path(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  if (ends_with(".java")) return Language::java;
  if (ends_with(".py") || ends_with(".pyw")) return Language::python;
  return std::nullopt;
}

SourceFile::SourceFile(std::string path, Language language, std::string text)
    : path_(std::move(path)), language_(language), text_(std::move(text)) {
  std::size_t start = 0;
  while (true) {
    auto nl = text_.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text_.size() || lines_.empty()) lines_.push_back(text_.substr(start));
      break;
    }
    lines_.push_back(text_.substr(start, nl - start));
    start = nl + 1;
    if (start == text_.size()) {
      trailing_newline_ = true;
      break;
    }
  }
}

const std::string& SourceFile::line(int line) const {
  if (!has_line(line)) {
    fail(ErrorKind::CriterionNotFound,
         path_ + ":" + std::to_string(line) + " is outside the file");
  }
  return lines_[static_cast<std::size_t>(line - 1)];
}

std::string SourceFile::reconstruct() const {
  std::string out;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (i) out += '\n';
    out += lines_[i];
  }
  if (trailing_newline_) out += '\n';
  return out;
}

const SourceFile* Workspace::find(std::string_view path) const {
  auto it = by_path_.find(path);
  return it == by_path_.end() ? nullptr : &files_[it->second];
}

const SourceFile& Workspace::file(std::string_view path) const {
  if (const auto* f = find(path)) return *f;
  fail(ErrorKind::CriterionNotFound, "no such file in workspace: " + std::string(path));
}

std::size_t Workspace::file_order(std::string_view path) const {
  auto it = by_path_.find(path);
  return it == by_path_.end() ? files_.size() : it->second;
}

std::optional<std::string_view> Workspace::line_text(std::string_view path, int line) const {
  const auto* f = find(path);
  if (!f || !f->has_line(line)) return std::nullopt;
  return std::string_view(f->line(line));
}

const SourceFile* Workspace::resolve_hint(std::string_view hint) const {
  while (hint.starts_with("./")) hint.remove_prefix(2);
  if (hint.empty()) return nullptr;
  if (const auto* f = find(hint)) return f;
  const SourceFile* match = nullptr;
  for (const auto& f : files_) {
    const auto& p = f.path();
    bool suffix = p.size() > hint.size() && p.ends_with(hint) &&
                  p[p.size() - hint.size() - 1] == '/';
    bool reverse = hint.size() > p.size() && hint.ends_with(p) &&
                   hint[hint.size() - p.size() - 1] == '/';
    if (suffix || reverse) {
      if (match) return nullptr;  // ambiguous
      match = &f;
    }
  }
  return match;
}

Workspace load_workspace(std::vector<FileEntry> entries) {
  if (entries.empty()) fail(ErrorKind::EmptyWorkspace, "workspace has no files");
  Workspace ws;
  ws.files_.reserve(entries.size());
  for (auto& entry : entries) {
    if (ws.by_path_.contains(entry.path)) fail(ErrorKind::DuplicatePath, entry.path);
    auto lang = entry.language ? entry.language : language_from_path(entry.path);
    if (!lang) fail(ErrorKind::UnsupportedLanguage, entry.path);
    ws.by_path_.emplace(entry.path, ws.files_.size());
    ws.files_.emplace_back(std::move(entry.path), *lang, std::move(entry.text));
  }
  return ws;
}

namespace {

bool looks_binary(const std::string& bytes) {
  return bytes.find('\0') != std::string::npos;
}

std::optional<FileEntry> read_entry(const fs::path& root, const fs::path& file,
                                    std::vector<std::string>* warnings,
                                    const ScanOptions& options) {
  auto rel = file.lexically_relative(root).generic_string();
  auto warn = [&](const std::string& why) {
    if (warnings) warnings->push_back("skipping " + rel + ": " + why);
  };
  std::error_code ec;
  auto size = fs::file_size(file, ec);
  if (ec) {
    warn(ec.message());
    return std::nullopt;
  }
  if (size > options.max_file_bytes) {
    warn("larger than " + std::to_string(options.max_file_bytes) + " bytes");
    return std::nullopt;
  }
  std::ifstream in(file, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (looks_binary(text)) {
    warn("binary content");
    return std::nullopt;
  }
  return FileEntry{rel, std::move(text), std::nullopt};
}

}  // namespace

Workspace load_workspace_dir(const fs::path& root, std::vector<std::string>* warnings,
                             const ScanOptions& options) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    if (!language_from_path(entry.path().generic_string())) continue;
    paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<FileEntry> entries;
  for (const auto& p : paths) {
    if (auto e = read_entry(root, p, warnings, options)) entries.push_back(std::move(*e));
  }
  return load_workspace(std::move(entries));
}

Workspace load_workspace_manifest(const fs::path& root, const std::vector<std::string>& paths,
                                  std::vector<std::string>* warnings,
                                  const ScanOptions& options) {
  std::vector<FileEntry> entries;
  for (const auto& p : paths) {
    if (auto e = read_entry(root, root / p, warnings, options)) entries.push_back(std::move(*e));
  }
  return load_workspace(std::move(entries));
}

SlicingCriterion make_criterion(const Workspace& workspace, std::string file, int line,
                                std::vector<std::string> variables) {
  const auto* source = workspace.find(file);
  if (!source) fail(ErrorKind::CriterionNotFound, "no such file: " + file);
  if (!source->has_line(line)) {
    fail(ErrorKind::CriterionNotFound,
         file + ":" + std::to_string(line) + " is outside the file (" +
             std::to_string(source->line_count()) + " lines)");
  }
  SlicingCriterion c;
  c.file = std::move(file);
  c.line = line;
  c.statement_text = source->line(line);
  c.variables = variables.empty()
                    ? lexical::criterion_variables(c.statement_text, source->language())
                    : std::move(variables);
  return c;
}

}  // namespace agentslice
