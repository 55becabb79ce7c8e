#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agentslice {

enum class Language { java, python };

std::string_view to_string(Language lang);
std::optional<Language> parse_language(std::string_view name);
/// Detects the language from a file extension (`.java`, `.py`, `.pyw`).
std::optional<Language> language_from_path(std::string_view path);

/// One source file of the workspace. Lines are 1-based; the original text can
/// be reconstructed byte for byte from the line list.
class SourceFile {
 public:
  SourceFile(std::string path, Language language, std::string text);

  const std::string& path() const noexcept { return path_; }
  Language language() const noexcept { return language_; }
  const std::string& text() const noexcept { return text_; }
  int line_count() const noexcept { return static_cast<int>(lines_.size()); }
  bool has_line(int line) const noexcept { return line >= 1 && line <= line_count(); }
  /// Text of a 1-based line without its terminating newline.
  const std::string& line(int line) const;
  const std::vector<std::string>& lines() const noexcept { return lines_; }
  std::string reconstruct() const;

 private:
  std::string path_;
  Language language_;
  std::string text_;
  std::vector<std::string> lines_;
  bool trailing_newline_ = false;
};

struct FileEntry {
  std::string path;
  std::string text;
  std::optional<Language> language;
};

/// Immutable set of source files, addressed by workspace-relative path.
class Workspace {
 public:
  const std::vector<SourceFile>& files() const noexcept { return files_; }
  const SourceFile* find(std::string_view path) const;
  const SourceFile& file(std::string_view path) const;
  /// Position of a file in load order; used as a stable sort key.
  std::size_t file_order(std::string_view path) const;
  std::optional<std::string_view> line_text(std::string_view path, int line) const;
  /// Resolves a file hint emitted by a model: exact path first, then a unique
  /// path-suffix match (`Main.java` for `src/Main.java`).
  const SourceFile* resolve_hint(std::string_view hint) const;

 private:
  friend Workspace load_workspace(std::vector<FileEntry> entries);
  std::vector<SourceFile> files_;
  std::map<std::string, std::size_t, std::less<>> by_path_;
};

/// Errors: DuplicatePath, UnsupportedLanguage, EmptyWorkspace.
Workspace load_workspace(std::vector<FileEntry> entries);

struct ScanOptions {
  std::uintmax_t max_file_bytes = 2u * 1024u * 1024u;
};

/// Loads every `.java`/`.py` file under `root` (sorted by relative path).
/// Binary and oversized files are skipped and reported in `warnings`.
Workspace load_workspace_dir(const std::filesystem::path& root,
                             std::vector<std::string>* warnings = nullptr,
                             const ScanOptions& options = {});

/// Loads an explicit file manifest (paths relative to `root`).
Workspace load_workspace_manifest(const std::filesystem::path& root,
                                  const std::vector<std::string>& paths,
                                  std::vector<std::string>* warnings = nullptr,
                                  const ScanOptions& options = {});

/// Anchor of a backward slice.
struct SlicingCriterion {
  std::string file;
  int line = 0;
  std::vector<std::string> variables;
  std::string statement_text;
};

/// Validates (file, line) against the workspace and fills the statement text.
/// When `variables` is empty they are extracted from the statement.
/// Errors: CriterionNotFound.
SlicingCriterion make_criterion(const Workspace& workspace, std::string file, int line,
                                std::vector<std::string> variables = {});

}  // namespace agentslice
