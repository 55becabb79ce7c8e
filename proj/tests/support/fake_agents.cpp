#include "support/fake_agents.hpp"

#include <sstream>

namespace agentslice::testing {

const std::string& first_user_text(const ChatRequest& request) {
  for (const auto& m : request.messages) {
    if (m.role == "user") return m.text;
  }
  static const std::string empty;
  return empty;
}

AgentKind classify(const ChatRequest& request) {
  const auto& p = first_user_text(request);
  if (p.find("program slicing assistant") != std::string::npos) return AgentKind::synthesis;
  if (p.find("call resolution") != std::string::npos) return AgentKind::expansion;
  if (p.find("program analyst") != std::string::npos) return AgentKind::conciseness;
  if (p.find("inspector for backward slices") != std::string::npos) return AgentKind::completeness;
  if (p.find("slice completer") != std::string::npos) return AgentKind::refinement;
  throw std::runtime_error("unrecognised prompt");
}

std::map<std::string, std::string> prompt_blocks(const std::string& prompt) {
  std::map<std::string, std::string> out;
  std::istringstream in(prompt);
  std::string line, heading;
  bool open = false;
  while (std::getline(in, line)) {
    if (line.starts_with("### ")) {
      heading = line.substr(4);
      out[heading];
      open = true;
    } else if (line.starts_with("## ")) {
      open = false;
    } else if (open) {
      out[heading] += line + "\n";
    }
  }
  return out;
}

std::vector<BlockLine> file_block_lines(const std::string& block) {
  std::vector<BlockLine> out;
  std::istringstream in(block);
  std::string line, file;
  while (std::getline(in, line)) {
    if (line.starts_with("=== File: ") && line.ends_with(" ===")) {
      file = line.substr(10, line.size() - 14);
    } else if (line == "..." || line.empty() || file.empty()) {
      continue;
    } else {
      out.push_back({file, line});
    }
  }
  return out;
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  if (replies_.empty()) fail(ErrorKind::ProviderError, "script exhausted");
  ChatResponse r;
  r.text = replies_.front();
  replies_.pop_front();
  r.usage = {50, 10};
  return r;
}

std::vector<ChatRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mu_);
  return replies_.size();
}

OracleBackend::OracleBackend(std::map<std::string, std::set<std::string>> target, Options options)
    : target_(std::move(target)), options_(std::move(options)) {}

int OracleBackend::calls(AgentKind kind) const {
  std::lock_guard lock(mu_);
  auto it = calls_.find(kind);
  return it == calls_.end() ? 0 : it->second;
}

std::vector<ChatRequest> OracleBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<RawLine> OracleBackend::visible(const std::string& block, bool withheld, bool noise) const {
  std::vector<RawLine> out;
  for (const auto& l : file_block_lines(block)) {
    auto it = target_.find(l.file);
    bool wanted = it != target_.end() && it->second.contains(l.text);
    if (!wanted && !(noise && options_.noise.contains(l.text))) continue;
    if (options_.blind.contains(l.text)) continue;
    if (!withheld && options_.withheld.contains(l.text)) continue;
    out.push_back({l.file, l.text});
  }
  return out;
}

ChatResponse OracleBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  auto kind = classify(request);
  int n = ++calls_[kind];
  ChatResponse r;
  r.usage = options_.usage;
  if (n <= options_.garbage[kind]) {
    r.text = "I am not sure what you mean.";
    return r;
  }
  r.text = answer(kind, first_user_text(request));
  return r;
}

std::string OracleBackend::answer(AgentKind kind, const std::string& prompt) {
  auto blocks = prompt_blocks(prompt);
  switch (kind) {
    case AgentKind::synthesis: {
      auto lines = visible(blocks["Search Scope"], false, true);
      for (const auto& text : options_.invented) lines.push_back({std::nullopt, text});
      return write_slice_answer(lines);
    }
    case AgentKind::conciseness:
      return write_slice_answer(visible(blocks["Candidate Slice"], true, options_.keep_noise));
    case AgentKind::refinement:
      return write_slice_answer(visible(blocks["Search Scope"], true, false));
    case AgentKind::completeness: {
      if (options_.incomplete_calls >= 0) {
        if (calls_[kind] > options_.incomplete_calls) return write_completeness_answer({});
        return write_completeness_answer({{"a dependency is still missing", MissingKind::dependency}});
      }
      std::set<std::pair<std::string, std::string>> have;
      for (const auto& l : file_block_lines(blocks["Candidate Slice"])) have.emplace(l.file, l.text);
      std::vector<MissingItem> missing;
      for (const auto& l : visible(blocks["Search Scope"], true, false)) {
        if (!have.contains({*l.file_hint, l.text})) {
          missing.push_back({"line `" + collapse_whitespace(l.text) + "` in " + *l.file_hint, MissingKind::dependency});
        }
      }
      return write_completeness_answer(missing);
    }
    case AgentKind::expansion: {
      std::vector<std::pair<std::string, std::string>> picks;
      std::vector<std::pair<std::string, std::string>> catalog;  // (signature, file)
      std::istringstream fns(blocks["Project Functions"]);
      std::string line;
      while (std::getline(fns, line)) {
        if (!line.starts_with("- ")) continue;
        auto bar = line.find(" | ");
        auto file_at = line.find(" | file ");
        auto file_end = line.find(" | ", file_at + 8);
        catalog.emplace_back(line.substr(2, bar - 2), line.substr(file_at + 8, file_end - file_at - 8));
      }
      std::istringstream calls(blocks["Invocations"]);
      while (std::getline(calls, line)) {
        auto at = line.find(". call ");
        if (at == std::string::npos) continue;
        auto key_end = line.find_first_of(" ", at + 7);
        auto key = line.substr(at + 7, key_end - at - 7);
        auto name = key.substr(0, key.find('/'));
        for (const auto& [sig, file] : catalog) {
          auto qual = sig.substr(0, sig.find('('));
          auto leaf = qual.substr(qual.rfind('.') == std::string::npos ? 0 : qual.rfind('.') + 1);
          bool init = qual.ends_with(name + ".__init__");
          if (leaf == name || init) {
            picks.emplace_back(key, file + "::" + sig);
            break;
          }
        }
      }
      return write_expansion_answer(picks);
    }
  }
  return "{}";
}

std::map<std::string, std::set<std::string>> target_lines(const Workspace& ws,
                                                          const std::map<std::string, std::vector<int>>& lines) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [file, numbers] : lines) {
    for (int n : numbers) out[file].insert(std::string(*ws.line_text(file, n)));
  }
  return out;
}

}  // namespace agentslice::testing
