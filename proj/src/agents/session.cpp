#include <algorithm>
#include <fstream>

#include "agentslice/agents.hpp"

namespace agentslice {

using nlohmann::json;

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::synthesis: return "synthesis";
    case AgentKind::expansion: return "expansion";
    case AgentKind::conciseness: return "conciseness";
    case AgentKind::completeness: return "completeness";
    case AgentKind::refinement: return "refinement";
  }
  return "synthesis";
}

json to_json(const AgentStep& step) {
  return {{"agent", std::string(to_string(step.agent))},
          {"round", step.round},
          {"format_retry", step.format_retry},
          {"prompt", step.prompt},
          {"response", step.response},
          {"summary", step.summary},
          {"usage",
           {{"prompt_tokens", step.usage.prompt_tokens}, {"completion_tokens", step.usage.completion_tokens}}}};
}

std::string transcript_jsonl(const std::vector<AgentStep>& steps) {
  std::string out;
  for (const auto& s : steps) {
    out += to_json(s).dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void write_transcript(const std::vector<AgentStep>& steps, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << transcript_jsonl(steps);
}

void SessionConfig::validate() const {
  if (max_verify_refine < 1) fail(ErrorKind::PreconditionViolation, "max_verify_refine must be positive");
  if (max_expansion_rounds < 1) {
    fail(ErrorKind::PreconditionViolation, "max_expansion_rounds must be positive");
  }
  if (token_budget < 1) fail(ErrorKind::PreconditionViolation, "token budget must be positive");
  if (temperature < 0.0 || temperature > 2.0) {
    fail(ErrorKind::PreconditionViolation, "temperature must lie in [0, 2]");
  }
}

namespace {

json refs_json(const std::vector<SliceLine>& lines) {
  json out = json::array();
  for (const auto& l : lines) out.push_back({{"file", l.file}, {"line", l.line}});
  return out;
}

std::string strip_kind_prefix(const Error& e) {
  std::string what = e.what();
  auto prefix = std::string(to_string(e.kind())) + ": ";
  return what.starts_with(prefix) ? what.substr(prefix.size()) : what;
}

}  // namespace

SliceSession::SliceSession(std::shared_ptr<const SyntaxIndex> index, SlicingCriterion criterion,
                           std::shared_ptr<ChatBackend> backend, SessionConfig config,
                           PromptLibrary prompts)
    : index_(std::move(index)),
      criterion_(std::move(criterion)),
      backend_(std::move(backend)),
      config_(std::move(config)),
      prompts_(std::move(prompts)),
      locator_(index_->workspace()),
      catalog_(list_project_functions(*index_)),
      scope_(index_->workspace_ptr()),
      current_(criterion_),
      budget_(config_.token_budget) {
  config_.validate();
  auto text = index_->workspace().line_text(criterion_.file, criterion_.line);
  if (!text) {
    fail(ErrorKind::CriterionNotFound, criterion_.file + ":" + std::to_string(criterion_.line));
  }
  if (*text != criterion_.statement_text) {
    fail(ErrorKind::PreconditionViolation, "criterion statement differs from the workspace line");
  }
}

void SliceSession::check_invariants(const Slice& slice) {
  ++counters_.invariant_checks;
  const auto& ws = index_->workspace();
  auto violated = [](const std::string& what) { fail(ErrorKind::InvariantViolation, what); };
  if (!slice.contains(criterion_.file, criterion_.line)) violated("criterion line missing from slice");
  for (const auto& l : slice.lines()) {
    auto text = ws.line_text(l.file, l.line);
    if (!text) violated("slice line " + l.file + ":" + std::to_string(l.line) + " is not in the workspace");
    if (*text != l.text) violated("slice text differs from the workspace at " + l.file + ":" + std::to_string(l.line));
  }
  if (scope_.line_count() < last_scope_lines_ || scope_.generation() < last_generation_) {
    violated("search scope shrank");
  }
  last_scope_lines_ = scope_.line_count();
  last_generation_ = scope_.generation();
  if (visited_.size() < last_visited_) violated("visited function set shrank");
  last_visited_ = visited_.size();
  if (counters_.expansion_rounds > config_.max_expansion_rounds) violated("expansion rounds over the cap");
  if (counters_.synthesis_passes > 1 + config_.max_expansion_rounds) violated("synthesis passes over the cap");
  if (counters_.verify_refine_rounds > config_.max_verify_refine) violated("verify/refine rounds over the cap");
}

void SliceSession::accept(const Slice& slice) {
  check_invariants(slice);
  current_ = slice;
}

std::string SliceSession::ask(AgentKind agent, int round, const std::string& prompt,
                              const std::vector<ChatMessage>& history) {
  budget_.check();
  ChatRequest req;
  req.model_id = config_.model_id;
  req.temperature = config_.temperature;
  req.max_output = config_.max_output;
  if (!config_.system_message.empty()) req.messages.push_back({"system", config_.system_message});
  if (history.empty()) {
    req.messages.push_back({"user", prompt});
  } else {
    req.messages.insert(req.messages.end(), history.begin(), history.end());
  }
  auto resp = backend_->complete(req);
  Usage usage = resp.usage;
  if (usage.total() == 0) {
    for (const auto& m : req.messages) usage.prompt_tokens += estimate_tokens(m.text);
    usage.completion_tokens = estimate_tokens(resp.text);
  }
  budget_.charge(usage);
  AgentStep step;
  step.agent = agent;
  step.round = round;
  step.prompt = history.empty() ? prompt : history.back().text;
  step.response = resp.text;
  step.usage = usage;
  step.format_retry = !history.empty();
  transcript_.push_back(std::move(step));
  return resp.text;
}

template <class Parse>
auto SliceSession::ask_parsed(AgentKind agent, int round, const std::string& prompt, Parse parse) {
  auto reply = ask(agent, round, prompt);
  try {
    return parse(reply);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseError) throw;
    transcript_.back().summary["parse_error"] = strip_kind_prefix(e);
  }
  // One reminder, then give up.
  ++counters_.format_retries;
  auto retry = ask(agent, round, prompt,
                   {{"user", prompt}, {"assistant", reply}, {"user", render_format_reminder(prompts_)}});
  return parse(retry);
}

Slice SliceSession::slicing_pass(int round) {
  auto prompt = render_synthesis_prompt(prompts_, criterion_, scope_, {config_.prompt_char_budget});
  ++counters_.synthesis_passes;
  auto raw = ask_parsed(AgentKind::synthesis, round, prompt, parse_slice_response);
  auto [slice, report] = align_text_to_slice(raw, locator_, &scope_, &current_, criterion_);
  hallucinated_.insert(hallucinated_.end(), report.hallucinated.begin(), report.hallucinated.end());
  auto merged = merge_slices(current_, slice);
  transcript_.back().summary.update({{"pass", counters_.synthesis_passes},
                                     {"aligned", report.aligned.size()},
                                     {"hallucinated", report.hallucinated.size()},
                                     {"ambiguous_resolved", report.ambiguous_resolved},
                                     {"scope_lines", scope_.line_count()},
                                     {"slice_lines", merged.size()}});
  return merged;
}

std::vector<const FunctionRecord*> SliceSession::candidates_for(const CallSite& call) const {
  std::vector<const FunctionRecord*> out;
  for (const auto& f : catalog_) {
    bool by_name = f.name == call.callee_name;
    // Python classes are called by name and run __init__.
    bool by_class = f.kind == FunctionKind::constructor && f.name == "__init__" &&
                    f.qualified_name.ends_with(call.callee_name + ".__init__") &&
                    (f.qualified_name.size() == call.callee_name.size() + 9 ||
                     f.qualified_name[f.qualified_name.size() - call.callee_name.size() - 10] == '.');
    if (by_name || by_class) out.push_back(&f);
  }
  return out;
}

std::vector<CallSite> SliceSession::pending_calls(std::set<std::string>& asked) const {
  std::map<Language, CodeFragment> fragments;
  for (const auto& l : current_.lines()) {
    auto lang = index_->workspace().file(l.file).language();
    auto& frag = fragments[lang];
    frag.language = lang;
    frag.lines.push_back({l.file, l.line, l.text});
  }
  std::vector<CallSite> out;
  std::set<std::string> seen;
  for (const auto& [lang, frag] : fragments) {
    for (auto& call : extract_invocations(*index_, frag, config_.exclusions)) {
      auto key = call.key();
      if (asked.contains(key) || seen.contains(key)) continue;
      auto cands = candidates_for(call);
      if (cands.empty()) continue;
      bool all_visited = std::all_of(cands.begin(), cands.end(),
                                     [&](const FunctionRecord* f) { return visited_.contains(f->id()); });
      if (all_visited) continue;
      seen.insert(key);
      out.push_back(std::move(call));
    }
  }
  return out;
}

Slice SliceSession::run_synthesis() {
  scope_.add(criterion_scope(*index_, criterion_));
  if (const auto* fn = index_->enclosing_function(criterion_.file, criterion_.line)) {
    visited_.insert(fn->id());
    entered_[fn->id()] = 1;
  }
  check_invariants(current_);
  accept(slicing_pass(0));

  std::set<std::string> asked;
  while (true) {
    auto calls = pending_calls(asked);
    if (calls.empty()) break;
    if (counters_.expansion_rounds >= config_.max_expansion_rounds) break;
    int round = ++counters_.expansion_rounds;
    for (const auto& c : calls) asked.insert(c.key());

    auto prompt = render_expansion_prompt(prompts_, index_->workspace(), calls, catalog_);
    auto answer = ask_parsed(AgentKind::expansion, round, prompt, [&](const std::string& text) {
      return parse_expansion_response(text, calls, catalog_);
    });
    std::vector<CodeRegion> bodies;
    json resolved = json::array();
    json added = json::array();
    for (const auto& [call, fn] : answer.resolved) {
      resolved.push_back({{"call", call.key()}, {"target", fn.id()}});
      if (!visited_.insert(fn.id()).second) continue;
      ++entered_[fn.id()];
      added.push_back(fn.id());
      bodies.push_back({fn.file, fn.body_span, RegionRole::function_body});
    }
    json keys = json::array();
    for (const auto& c : calls) keys.push_back(c.key());
    transcript_.back().summary.update({{"calls", keys},
                                       {"resolved", resolved},
                                       {"entered", added},
                                       {"hallucinated", answer.hallucinated},
                                       {"duplicates", answer.duplicates}});
    bool grew = scope_.add(bodies);
    check_invariants(current_);
    if (!grew) continue;
    if (counters_.synthesis_passes >= 1 + config_.max_expansion_rounds) break;
    accept(slicing_pass(round));
  }

  std::vector<SliceRef> refs;
  for (const auto& l : current_.lines()) refs.push_back({l.file, l.line});
  bool grew = scope_.add(module_context(*index_, refs, scope_.regions()));
  check_invariants(current_);
  if (grew && counters_.synthesis_passes < 1 + config_.max_expansion_rounds) {
    accept(slicing_pass(counters_.expansion_rounds + 1));
    transcript_.back().summary["module_context"] = true;
  }
  return current_;
}

std::pair<Slice, std::vector<SliceLine>> SliceSession::run_conciseness(const Slice& slice) {
  if (slice.size() == 0) fail(ErrorKind::PreconditionViolation, "conciseness needs a slice");
  ++counters_.conciseness_calls;
  auto prompt = render_conciseness_prompt(prompts_, slice, criterion_);
  auto raw = ask_parsed(AgentKind::conciseness, counters_.verify_refine_rounds, prompt, parse_slice_response);
  AlignOptions opts;
  opts.allowed = [&](const std::string& f, int l) { return slice.contains(f, l); };
  Slice kept = slice;
  std::vector<SliceLine> removed;
  try {
    auto [aligned, report] = align_text_to_slice(raw, locator_, &scope_, &slice, criterion_, opts);
    kept = aligned;
    for (const auto& l : slice.lines()) {
      if (!kept.contains(l.file, l.line)) removed.push_back(l);
    }
    transcript_.back().summary["ignored_lines"] = report.hallucinated.size();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyAlignment) throw;
    transcript_.back().summary["ignored_reply"] = "no kept line matched the slice";
  }
  transcript_.back().summary["removed"] = refs_json(removed);
  transcript_.back().summary["kept"] = kept.size();
  accept(kept);
  return {kept, removed};
}

CompletenessAnswer SliceSession::run_completeness(const Slice& slice) {
  if (scope_.empty()) fail(ErrorKind::PreconditionViolation, "completeness runs after synthesis");
  ++counters_.completeness_calls;
  auto prompt = render_completeness_prompt(prompts_, slice, criterion_, scope_);
  auto answer = ask_parsed(AgentKind::completeness, counters_.verify_refine_rounds, prompt,
                           parse_completeness_response);
  json missing = json::array();
  for (const auto& m : answer.missing) {
    missing.push_back({{"kind", std::string(to_string(m.kind))}, {"description", m.description}});
  }
  transcript_.back().summary.update(
      {{"verdict", answer.verdict == Verdict::complete ? "complete" : "incomplete"}, {"missing", missing}});
  check_invariants(slice);
  return answer;
}

Slice SliceSession::run_refinement(const Slice& slice, const std::vector<MissingItem>& missing) {
  if (missing.empty()) fail(ErrorKind::PreconditionViolation, "refinement needs missing items");
  ++counters_.refinements;
  auto prompt = render_refinement_prompt(prompts_, slice, scope_, missing);
  auto raw = ask_parsed(AgentKind::refinement, counters_.verify_refine_rounds, prompt, parse_slice_response);
  AlignOptions opts;
  opts.allowed = [&](const std::string& f, int l) { return scope_.contains(f, l) || slice.contains(f, l); };
  auto [aligned, report] = align_text_to_slice(raw, locator_, &scope_, &slice, criterion_, opts);
  hallucinated_.insert(hallucinated_.end(), report.hallucinated.begin(), report.hallucinated.end());
  auto merged = merge_slices(slice, aligned);
  std::vector<SliceLine> added;
  for (const auto& l : merged.lines()) {
    if (!slice.contains(l.file, l.line)) added.push_back(l);
  }
  json rejected = json::array();
  for (const auto& r : report.rejected) rejected.push_back(r.text);
  transcript_.back().summary.update({{"added", refs_json(added)},
                                     {"rejected_outside_scope", rejected},
                                     {"hallucinated", report.hallucinated.size()}});
  for (const auto& l : added) {
    if (!scope_.contains(l.file, l.line)) {
      fail(ErrorKind::InvariantViolation, "refinement added a line outside the search scope");
    }
  }
  accept(merged);
  return merged;
}

PipelineError::PipelineError(const Error& cause, std::vector<AgentStep> transcript,
                             std::optional<Slice> last_valid, SessionCounters counters)
    : Error(cause.kind(), strip_kind_prefix(cause)),
      cause_(cause.kind()),
      transcript_(std::move(transcript)),
      last_valid_(std::move(last_valid)),
      counters_(counters) {}

PipelineResult run_pipeline(std::shared_ptr<const SyntaxIndex> index, const SlicingCriterion& criterion,
                            std::shared_ptr<ChatBackend> backend, const SessionConfig& config,
                            const PromptLibrary& prompts) {
  SliceSession session(std::move(index), criterion, std::move(backend), config, prompts);
  std::vector<VerificationReport> reports;
  bool synthesized = false;
  try {
    Slice slice = session.run_synthesis();
    synthesized = true;
    for (int round = 1; round <= config.max_verify_refine; ++round) {
      session.counters().verify_refine_rounds = round;
      VerificationReport report;
      auto [kept, removed] = session.run_conciseness(slice);
      slice = kept;
      report.removed_lines = removed;
      report.completeness = session.run_completeness(slice);
      reports.push_back(report);
      if (report.completeness.verdict == Verdict::complete) break;
      slice = session.run_refinement(slice, report.completeness.missing);
    }
    return {slice, session.transcript(), session.counters(), reports, session.hallucinated(),
            session.tokens_used()};
  } catch (const Error& e) {
    std::optional<Slice> last;
    if (synthesized) last = session.current();
    throw PipelineError(e, session.transcript(), last, session.counters());
  }
}

}  // namespace agentslice
