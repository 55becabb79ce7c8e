#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agentslice/aci.hpp"
#include "agentslice/scope.hpp"
#include "agentslice/slice.hpp"

namespace agentslice {

enum class PromptKind { synthesis, expansion, conciseness, completeness, refinement, format_reminder };
std::string_view to_string(PromptKind kind);
inline constexpr PromptKind kAllPrompts[] = {PromptKind::synthesis,    PromptKind::expansion,
                                             PromptKind::conciseness,  PromptKind::completeness,
                                             PromptKind::refinement,   PromptKind::format_reminder};

/// One prompt. Sections render in the order role, data, definitions, rules,
/// task, output format; empty optional sections are skipped.
struct PromptSections {
  std::string role;
  std::vector<std::pair<std::string, std::string>> data;  // (heading, block)
  std::string definitions;
  std::string rules;
  std::string task;
  std::string output_format;

  std::string render() const;
};

/// Text of one prompt template, split by `@section` markers.
struct PromptTemplate {
  std::string role, definitions, rules, task, output_format;
};

/// Placeholders allowed inside templates, written `{{name}}`.
inline constexpr std::string_view kPlaceholders[] = {"criterion_file", "criterion_line",
                                                     "statement", "variables"};

/// Parses template text. Errors: InvalidTemplate (unknown section or
/// placeholder, missing role).
PromptTemplate parse_template(std::string_view text, std::string_view name);

class PromptLibrary {
 public:
  /// Templates compiled into the binary (identical to the shipped files).
  static PromptLibrary defaults();
  /// Starts from the defaults and overrides every `<kind>.tmpl` found in `dir`.
  static PromptLibrary load(const std::filesystem::path& dir);

  const PromptTemplate& get(PromptKind kind) const { return templates_.at(kind); }

 private:
  std::map<PromptKind, PromptTemplate> templates_;
};

/// Raw template text compiled into the binary.
std::string_view default_template_text(PromptKind kind);

struct RenderLimits {
  std::size_t max_chars = 48000;
};

/// Errors: PreconditionViolation (empty scope), ScopeTooLarge.
std::string render_synthesis_prompt(const PromptLibrary& lib, const SlicingCriterion& criterion,
                                    const SearchScope& scope, const RenderLimits& limits = {});
/// Errors: PreconditionViolation (no call sites).
std::string render_expansion_prompt(const PromptLibrary& lib, const Workspace& workspace,
                                    const std::vector<CallSite>& calls,
                                    const std::vector<FunctionRecord>& catalog);
std::string render_conciseness_prompt(const PromptLibrary& lib, const Slice& slice,
                                      const SlicingCriterion& criterion);
std::string render_completeness_prompt(const PromptLibrary& lib, const Slice& slice,
                                       const SlicingCriterion& criterion, const SearchScope& scope);

enum class MissingKind { dependency, structural };
std::string_view to_string(MissingKind kind);

struct MissingItem {
  std::string description;
  MissingKind kind = MissingKind::dependency;
  bool operator==(const MissingItem&) const = default;
};

std::string render_refinement_prompt(const PromptLibrary& lib, const Slice& slice,
                                     const SearchScope& scope,
                                     const std::vector<MissingItem>& missing);
std::string render_format_reminder(const PromptLibrary& lib);

/// Block rendering shared by several prompts.
std::string render_criterion_block(const SlicingCriterion& criterion);
std::string render_slice_block(const Slice& slice);

// --- responses -------------------------------------------------------------

/// Finds the JSON object in a model answer: whole text, fenced json block,
/// then the first '{' .. last '}'.
std::optional<nlohmann::json> extract_json_object(std::string_view text);

/// Errors: ParseError when neither the JSON schema nor filename-tagged fenced
/// blocks yield a line.
std::vector<RawLine> parse_slice_response(std::string_view text);

struct ExpansionAnswer {
  std::vector<std::pair<CallSite, FunctionRecord>> resolved;
  int hallucinated = 0;  // targets absent from the catalog, or unknown calls
  int duplicates = 0;    // further targets for an already resolved call
  std::vector<std::string> notes;
};

/// Errors: ParseError.
ExpansionAnswer parse_expansion_response(std::string_view text, const std::vector<CallSite>& calls,
                                         const std::vector<FunctionRecord>& catalog);

enum class Verdict { complete, incomplete };

struct CompletenessAnswer {
  Verdict verdict = Verdict::complete;
  std::vector<MissingItem> missing;
  bool operator==(const CompletenessAnswer&) const = default;
};

/// Errors: ParseError.
CompletenessAnswer parse_completeness_response(std::string_view text);

// Answer writers, used by fakes and round-trip tests.
std::string write_slice_answer(const std::vector<RawLine>& lines);
std::string write_expansion_answer(const std::vector<std::pair<std::string, std::string>>& call_to_target);
std::string write_completeness_answer(const std::vector<MissingItem>& missing);

}  // namespace agentslice
