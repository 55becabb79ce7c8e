#include <map>

#include "agentslice/error.hpp"
#include "agentslice/protocol.hpp"

namespace agentslice {

namespace {

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string substitute(const std::string& text, const SlicingCriterion* c) {
  if (text.find("{{") == std::string::npos) return text;
  std::map<std::string, std::string, std::less<>> values;
  if (c) {
    values["criterion_file"] = c->file;
    values["criterion_line"] = std::to_string(c->line);
    values["statement"] = collapse_whitespace(c->statement_text);
    values["variables"] = c->variables.empty() ? "(none)" : join(c->variables, ", ");
  }
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = text.find("{{", pos);
    if (open == std::string::npos) break;
    auto close = text.find("}}", open);
    out.append(text, pos, open - pos);
    auto key = text.substr(open + 2, close - open - 2);
    auto it = values.find(key);
    out += it == values.end() ? "" : it->second;
    pos = close + 2;
  }
  out.append(text, pos);
  return out;
}

PromptSections from_template(const PromptTemplate& t, const SlicingCriterion* c) {
  PromptSections s;
  s.role = substitute(t.role, c);
  s.definitions = substitute(t.definitions, c);
  s.rules = substitute(t.rules, c);
  s.task = substitute(t.task, c);
  s.output_format = substitute(t.output_format, c);
  return s;
}

}  // namespace

std::string PromptSections::render() const {
  if (role.empty() || data.empty()) {
    fail(ErrorKind::PreconditionViolation, "a prompt needs a role and input data");
  }
  std::string out = "## Role\n" + chomp(role) + "\n\n## Input Data\n";
  for (const auto& [heading, block] : data) {
    out += "### " + heading + "\n" + chomp(block) + "\n\n";
  }
  auto section = [&](std::string_view title, const std::string& body) {
    if (body.empty()) return;
    out += "## ";
    out += title;
    out += "\n" + chomp(body) + "\n\n";
  };
  section("Definitions", definitions);
  section("Rules", rules);
  section("Task", task);
  section("Output Format", output_format);
  return chomp(out) + "\n";
}

std::string render_criterion_block(const SlicingCriterion& c) {
  return "File: " + c.file + "\nLine: " + std::to_string(c.line) + "\nStatement: " +
         collapse_whitespace(c.statement_text) + "\nVariables: " + (c.variables.empty() ? "(none)" : join(c.variables, ", "));
}

std::string render_slice_block(const Slice& slice) {
  std::string out;
  const std::string* current = nullptr;
  for (const auto& l : slice.lines()) {
    if (!current || *current != l.file) {
      if (current) out += '\n';
      out += "=== File: " + l.file + " ===\n";
      current = &l.file;
    }
    out += l.text + "\n";
  }
  return out;
}

std::string render_synthesis_prompt(const PromptLibrary& lib, const SlicingCriterion& criterion,
                                    const SearchScope& scope, const RenderLimits& limits) {
  if (scope.empty()) fail(ErrorKind::PreconditionViolation, "synthesis needs a non-empty scope");
  auto s = from_template(lib.get(PromptKind::synthesis), &criterion);
  s.data = {{"Slicing Criterion", render_criterion_block(criterion)},
            {"Search Scope", scope.render()}};
  auto text = s.render();
  if (text.size() > limits.max_chars) {
    fail(ErrorKind::ScopeTooLarge, "synthesis prompt has " + std::to_string(text.size()) +
                                       " characters, budget is " + std::to_string(limits.max_chars));
  }
  return text;
}

std::string render_expansion_prompt(const PromptLibrary& lib, const Workspace& workspace,
                                    const std::vector<CallSite>& calls,
                                    const std::vector<FunctionRecord>& catalog) {
  if (calls.empty()) fail(ErrorKind::PreconditionViolation, "expansion needs at least one call site");
  auto s = from_template(lib.get(PromptKind::expansion), nullptr);
  std::string invocations;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto& c = calls[i];
    invocations += std::to_string(i + 1) + ". call " + c.key();
    if (c.receiver_hint) invocations += " (receiver: " + *c.receiver_hint + ")";
    invocations += " at " + c.file + ":" + std::to_string(c.line);
    if (auto text = workspace.line_text(c.file, c.line)) {
      invocations += ": " + collapse_whitespace(*text);
    }
    invocations += '\n';
  }
  std::string functions;
  for (const auto& f : catalog) {
    functions += "- " + f.signature() + " | " + std::string(to_string(f.kind)) + " | file " + f.file;
    if (!f.supertypes.empty()) functions += " | supertypes: " + join(f.supertypes, ", ");
    functions += '\n';
  }
  if (functions.empty()) functions = "(none)";
  s.data = {{"Invocations", invocations}, {"Project Functions", functions}};
  return s.render();
}

std::string render_conciseness_prompt(const PromptLibrary& lib, const Slice& slice,
                                      const SlicingCriterion& criterion) {
  if (slice.size() == 0) fail(ErrorKind::PreconditionViolation, "conciseness needs a non-empty slice");
  auto s = from_template(lib.get(PromptKind::conciseness), &criterion);
  s.data = {{"Slicing Criterion", render_criterion_block(criterion)},
            {"Candidate Slice", render_slice_block(slice)}};
  return s.render();
}

std::string render_completeness_prompt(const PromptLibrary& lib, const Slice& slice,
                                       const SlicingCriterion& criterion, const SearchScope& scope) {
  if (slice.size() == 0) fail(ErrorKind::PreconditionViolation, "completeness needs a non-empty slice");
  if (scope.empty()) fail(ErrorKind::PreconditionViolation, "completeness needs a non-empty scope");
  auto s = from_template(lib.get(PromptKind::completeness), &criterion);
  s.data = {{"Slicing Criterion", render_criterion_block(criterion)},
            {"Search Scope", scope.render()},
            {"Candidate Slice", render_slice_block(slice)}};
  return s.render();
}

std::string_view to_string(MissingKind kind) {
  return kind == MissingKind::structural ? "structural" : "dependency";
}

std::string render_refinement_prompt(const PromptLibrary& lib, const Slice& slice,
                                     const SearchScope& scope,
                                     const std::vector<MissingItem>& missing) {
  if (missing.empty()) fail(ErrorKind::PreconditionViolation, "refinement needs missing items");
  auto s = from_template(lib.get(PromptKind::refinement), &slice.criterion());
  std::string items;
  for (std::size_t i = 0; i < missing.size(); ++i) {
    items += std::to_string(i + 1) + ". [" + std::string(to_string(missing[i].kind)) + "] " +
             missing[i].description + "\n";
  }
  s.data = {{"Missing Information", items},
            {"Search Scope", scope.render()},
            {"Candidate Slice", render_slice_block(slice)}};
  return s.render();
}

std::string render_format_reminder(const PromptLibrary& lib) {
  const auto& t = lib.get(PromptKind::format_reminder);
  return chomp(t.task.empty() ? t.role : t.task) + "\n";
}

}  // namespace agentslice
