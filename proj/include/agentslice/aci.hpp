#pragma once

// The four deterministic syntax queries offered to the agents:
// criterion scope search, invocation extraction, project function retrieval
// and module information extraction. All are pure functions of the index.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agentslice/syntax_index.hpp"
#include "agentslice/workspace.hpp"

namespace agentslice {

enum class RegionRole { criterion_scope, function_body, global_decl, structural };
std::string_view to_string(RegionRole role);

struct CodeRegion {
  std::string file;
  LineSpan span;
  RegionRole role = RegionRole::function_body;
  bool operator==(const CodeRegion&) const = default;
};

struct CallSite {
  std::string callee_name;
  std::optional<std::string> receiver_hint;
  int arity = 0;
  std::string file;
  int line = 0;

  /// `name/arity`, the key used by the expansion protocol.
  std::string key() const { return callee_name + "/" + std::to_string(arity); }
  bool operator==(const CallSite&) const = default;
};

/// Which callees count as built-in and are dropped from invocation lists.
struct ExclusionPolicy {
  /// Python: drop built-in function names called without a receiver.
  bool python_builtins = true;
  /// Python: keep a built-in name when the project defines a function with it.
  bool python_keep_shadowed = true;
  /// Java: drop callees that match no project function or class by name.
  bool java_drop_unknown = true;
  /// Always dropped for Java.
  std::set<std::string, std::less<>> java_hard_list = {"println", "print",   "printf",
                                                       "format",  "valueOf", "toString"};
  std::set<std::string, std::less<>> extra;  // dropped for both languages
};

struct FragmentLine {
  std::string file;
  int line = 0;
  std::string text;
};

/// Code lines of one language, typically the lines of a candidate slice.
struct CodeFragment {
  Language language = Language::python;
  std::vector<FragmentLine> lines;
};

/// Region to start slicing from: the enclosing function body, else the
/// smallest enclosing block/class, else the whole module.
/// Errors: CriterionNotFound.
CodeRegion criterion_scope(const SyntaxIndex& index, const SlicingCriterion& criterion);

/// Call expressions in the fragment (source order, nested calls included)
/// minus built-ins per the policy. Unparseable lines yield nothing.
std::vector<CallSite> extract_invocations(const SyntaxIndex& index, const CodeFragment& fragment,
                                          const ExclusionPolicy& policy = {});

/// Every named function, method and constructor exactly once (lambdas are
/// indexed but not callable by name, so they are left out).
std::vector<FunctionRecord> list_project_functions(const SyntaxIndex& index);

struct SliceRef {
  std::string file;
  int line = 0;
};

/// Declarations of globals/members referenced by the slice lines, bodies of
/// functions writing them, and structural lines of every contributing file.
/// Regions are merged per file and returned in workspace order; lines already
/// covered by `covered` are removed.
std::vector<CodeRegion> module_context(const SyntaxIndex& index,
                                       const std::vector<SliceRef>& slice_lines,
                                       const std::vector<CodeRegion>& covered = {});

/// Merges overlapping regions per file (stronger role wins), joins adjacent
/// regions of equal role and sorts them by
/// (file order, start line).
std::vector<CodeRegion> normalize_regions(const Workspace& workspace,
                                          std::vector<CodeRegion> regions);

}  // namespace agentslice
