#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agentslice/scope.hpp"
#include "agentslice/workspace.hpp"

namespace agentslice {

/// Strips the line, collapses whitespace runs to one space, and returns ""
/// for non-semantic lines (only `(){}[]:;,` left once comments are removed).
/// Without a language only comment markers are dropped for that test.
std::string normalize_line(std::string_view text, std::optional<Language> lang = std::nullopt);
bool is_non_semantic(std::string_view text, std::optional<Language> lang = std::nullopt);
/// Strip + collapse only; the key used to match model output to source.
std::string collapse_whitespace(std::string_view text);

struct SliceLine {
  std::string file;
  int line = 0;
  std::string text;

  bool operator==(const SliceLine& o) const { return file == o.file && line == o.line; }
  auto operator<=>(const SliceLine& o) const {
    if (auto c = file <=> o.file; c != 0) return c;
    return line <=> o.line;
  }
};

/// Ordered set of whole source lines. The criterion line is always a member.
class Slice {
 public:
  explicit Slice(SlicingCriterion criterion);

  const SlicingCriterion& criterion() const noexcept { return criterion_; }
  const std::set<SliceLine>& lines() const noexcept { return lines_; }
  std::size_t size() const noexcept { return lines_.size(); }
  bool contains(std::string_view file, int line) const;
  void insert(SliceLine line);
  /// Removing the criterion line is a no-op; returns whether a line was removed.
  bool erase(std::string_view file, int line);
  std::vector<std::pair<std::string, int>> refs() const;

  bool operator==(const Slice& o) const;

 private:
  SlicingCriterion criterion_;
  std::set<SliceLine> lines_;
};

/// Errors: CriterionMismatch.
Slice merge_slices(const Slice& a, const Slice& b);

struct RawLine {
  std::optional<std::string> file_hint;
  std::string text;
  bool operator==(const RawLine&) const = default;
};

struct AlignmentReport {
  std::vector<SliceLine> aligned;
  std::vector<RawLine> hallucinated;
  /// Subset of `hallucinated` that matched the workspace but not `allowed`.
  std::vector<RawLine> rejected;
  int ambiguous_resolved = 0;
};

struct AlignOptions {
  /// When set, only lines accepted by the predicate are candidates.
  std::function<bool(const std::string& file, int line)> allowed;
};

/// Precomputed text-to-position lookup for one workspace.
class LineLocator {
 public:
  explicit LineLocator(const Workspace& workspace);
  const Workspace& workspace() const noexcept { return *workspace_; }
  /// Candidates for a raw line, tried with progressively looser keys.
  std::vector<std::pair<std::string, int>> candidates(std::string_view text) const;

 private:
  using Positions = std::vector<std::pair<std::string, int>>;
  const Workspace* workspace_;
  std::map<std::string, Positions, std::less<>> exact_;
  std::map<std::string, Positions, std::less<>> uncommented_;
  std::map<std::string, Positions, std::less<>> spaceless_;
};

/// Maps raw model output lines onto workspace lines. Search order: hinted
/// file, then scope, then the whole workspace; ties prefer in-scope lines,
/// then lines not yet used, then lines of `previous`, then the line nearest
/// to the last aligned line of that file, then the smallest line number.
/// The criterion line is appended. Errors: EmptyAlignment.
std::pair<Slice, AlignmentReport> align_text_to_slice(const std::vector<RawLine>& raw,
                                                      const LineLocator& locator,
                                                      const SearchScope* scope,
                                                      const Slice* previous,
                                                      const SlicingCriterion& criterion,
                                                      const AlignOptions& options = {});

nlohmann::json slice_to_json(const Slice& slice, const std::vector<RawLine>& hallucinated = {},
                             const std::optional<std::string>& error = std::nullopt);
/// Reads the slice JSON format back; lines absent from the workspace are
/// rejected with SchemaError.
Slice slice_from_json(const nlohmann::json& j, const Workspace& workspace);

}  // namespace agentslice
