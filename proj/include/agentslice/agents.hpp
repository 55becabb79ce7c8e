#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentslice/aci.hpp"
#include "agentslice/error.hpp"
#include "agentslice/llm.hpp"
#include "agentslice/protocol.hpp"
#include "agentslice/scope.hpp"
#include "agentslice/slice.hpp"

namespace agentslice {

enum class AgentKind { synthesis, expansion, conciseness, completeness, refinement };
std::string_view to_string(AgentKind kind);

struct AgentStep {
  AgentKind agent = AgentKind::synthesis;
  int round = 0;  // expansion round or verify/refine round; 0 for the first synthesis pass
  std::string prompt;
  std::string response;
  nlohmann::json summary = nlohmann::json::object();
  Usage usage;
  bool format_retry = false;  // this call re-asked after an unparseable reply
};

nlohmann::json to_json(const AgentStep& step);
std::string transcript_jsonl(const std::vector<AgentStep>& steps);
void write_transcript(const std::vector<AgentStep>& steps, const std::filesystem::path& path);

struct SessionConfig {
  int max_verify_refine = 5;
  int max_expansion_rounds = 10;
  long token_budget = 200000;
  std::size_t prompt_char_budget = 48000;
  std::string model_id = "gpt-4o";
  double temperature = 0.0;
  int max_output = 4096;
  std::string system_message;  // omitted from requests when empty
  ExclusionPolicy exclusions;

  /// Errors: PreconditionViolation.
  void validate() const;
};

struct SessionCounters {
  int synthesis_passes = 0;
  int expansion_rounds = 0;
  int verify_refine_rounds = 0;
  int conciseness_calls = 0;
  int completeness_calls = 0;
  int refinements = 0;
  int format_retries = 0;
  int invariant_checks = 0;
};

struct VerificationReport {
  std::vector<SliceLine> removed_lines;
  CompletenessAnswer completeness;
};

/// One slicing run. Single-threaded; several sessions may share an index and
/// a backend.
class SliceSession {
 public:
  SliceSession(std::shared_ptr<const SyntaxIndex> index, SlicingCriterion criterion,
               std::shared_ptr<ChatBackend> backend, SessionConfig config = {},
               PromptLibrary prompts = PromptLibrary::defaults());

  /// Scope from the criterion, one slicing pass, call expansion until no new
  /// callee remains (or the round cap), then module context and a last pass.
  Slice run_synthesis();
  /// Returns the reduced slice and the removed lines.
  std::pair<Slice, std::vector<SliceLine>> run_conciseness(const Slice& slice);
  CompletenessAnswer run_completeness(const Slice& slice);
  Slice run_refinement(const Slice& slice, const std::vector<MissingItem>& missing);

  const SlicingCriterion& criterion() const noexcept { return criterion_; }
  const SearchScope& scope() const noexcept { return scope_; }
  const Slice& current() const noexcept { return current_; }
  const std::set<std::string>& visited_functions() const noexcept { return visited_; }
  /// How often each function body was added to the scope.
  const std::map<std::string, int>& entered_functions() const noexcept { return entered_; }
  const std::vector<AgentStep>& transcript() const noexcept { return transcript_; }
  const SessionCounters& counters() const noexcept { return counters_; }
  SessionCounters& counters() noexcept { return counters_; }
  const SessionConfig& config() const noexcept { return config_; }
  const std::vector<RawLine>& hallucinated() const noexcept { return hallucinated_; }
  long tokens_used() const { return budget_.used(); }

  /// Throws InvariantViolation when the slice, scope or counters break their
  /// contracts. Called after every agent step.
  void check_invariants(const Slice& slice);

 private:
  std::string ask(AgentKind agent, int round, const std::string& prompt,
                  const std::vector<ChatMessage>& history = {});
  template <class Parse>
  auto ask_parsed(AgentKind agent, int round, const std::string& prompt, Parse parse);
  Slice slicing_pass(int round);
  std::vector<CallSite> pending_calls(std::set<std::string>& asked) const;
  std::vector<const FunctionRecord*> candidates_for(const CallSite& call) const;
  void accept(const Slice& slice);

  std::shared_ptr<const SyntaxIndex> index_;
  SlicingCriterion criterion_;
  std::shared_ptr<ChatBackend> backend_;
  SessionConfig config_;
  PromptLibrary prompts_;
  LineLocator locator_;
  std::vector<FunctionRecord> catalog_;
  SearchScope scope_;
  Slice current_;
  std::set<std::string> visited_;
  std::map<std::string, int> entered_;
  std::vector<AgentStep> transcript_;
  SessionCounters counters_;
  TokenBudget budget_;
  std::vector<RawLine> hallucinated_;
  std::size_t last_scope_lines_ = 0;
  int last_generation_ = 0;
  std::size_t last_visited_ = 0;
};

struct PipelineResult {
  Slice slice;
  std::vector<AgentStep> transcript;
  SessionCounters counters;
  std::vector<VerificationReport> reports;
  std::vector<RawLine> hallucinated;
  long tokens_used = 0;
};

/// An agent failure with the state reached so far.
class PipelineError : public Error {
 public:
  PipelineError(const Error& cause, std::vector<AgentStep> transcript, std::optional<Slice> last_valid,
                SessionCounters counters);
  ErrorKind cause() const noexcept { return cause_; }
  const std::vector<AgentStep>& transcript() const noexcept { return transcript_; }
  const std::optional<Slice>& last_valid() const noexcept { return last_valid_; }
  const SessionCounters& counters() const noexcept { return counters_; }

 private:
  ErrorKind cause_;
  std::vector<AgentStep> transcript_;
  std::optional<Slice> last_valid_;
  SessionCounters counters_;
};

/// Synthesis once, then up to `max_verify_refine` rounds of conciseness,
/// completeness and (when incomplete) refinement. Errors: PipelineError.
PipelineResult run_pipeline(std::shared_ptr<const SyntaxIndex> index, const SlicingCriterion& criterion,
                            std::shared_ptr<ChatBackend> backend, const SessionConfig& config = {},
                            const PromptLibrary& prompts = PromptLibrary::defaults());

}  // namespace agentslice
