#pragma once

// Deterministic chat backends that play the agents in tests.

#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "agentslice/agents.hpp"

namespace agentslice::testing {

/// Which agent a request is addressed to, read from the role line of the
/// first user message.
AgentKind classify(const ChatRequest& request);
const std::string& first_user_text(const ChatRequest& request);

/// `### heading` blocks of a rendered prompt.
std::map<std::string, std::string> prompt_blocks(const std::string& prompt);

struct BlockLine {
  std::string file;
  std::string text;
};
/// Lines of a `=== File: p ===` block (scope or slice), gap markers dropped.
std::vector<BlockLine> file_block_lines(const std::string& block);

/// Replays a fixed list of replies in order and records every request.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}
  ChatResponse complete(const ChatRequest& request) override;
  std::vector<ChatRequest> requests() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> replies_;
  std::vector<ChatRequest> requests_;
};

/// Answers every agent from a known target slice. Synthesis, conciseness and
/// refinement return the target lines visible in the prompt; expansion
/// resolves calls by callee name; completeness reports visible target lines
/// that the candidate misses.
class OracleBackend : public ChatBackend {
 public:
  struct Options {
    /// Target lines the synthesis agent leaves out, so verification must find them.
    std::set<std::string> withheld;
    /// Non-target lines the synthesis agent adds; conciseness drops them
    /// unless `keep_noise`.
    std::set<std::string> noise;
    bool keep_noise = false;
    /// Target lines no agent ever returns.
    std::set<std::string> blind;
    /// Extra lines the synthesis agent invents.
    std::vector<std::string> invented;
    /// When >= 0, completeness says "incomplete" for this many calls and then
    /// "complete", whatever the candidate holds.
    int incomplete_calls = -1;
    /// Number of leading unparseable replies per agent kind.
    std::map<AgentKind, int> garbage;
    /// Usage reported per reply.
    Usage usage{100, 20};
  };

  /// `target` maps file paths to the exact line texts of the wanted slice.
  OracleBackend(std::map<std::string, std::set<std::string>> target, Options options);
  explicit OracleBackend(std::map<std::string, std::set<std::string>> target)
      : OracleBackend(std::move(target), Options{}) {}

  ChatResponse complete(const ChatRequest& request) override;
  int calls(AgentKind kind) const;
  std::vector<ChatRequest> requests() const;

 private:
  std::string answer(AgentKind kind, const std::string& prompt);
  std::vector<RawLine> visible(const std::string& block, bool withheld, bool noise) const;

  std::map<std::string, std::set<std::string>> target_;
  Options options_;
  mutable std::mutex mu_;
  std::map<AgentKind, int> calls_;
  std::vector<ChatRequest> requests_;
};

/// Target map from a workspace and 1-based line numbers per file.
std::map<std::string, std::set<std::string>> target_lines(const Workspace& ws,
                                                          const std::map<std::string, std::vector<int>>& lines);

}  // namespace agentslice::testing
