#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace agentslice {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string text;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model_id = "gpt-4o";
  double temperature = 0.0;
  std::vector<ChatMessage> messages;
  int max_output = 4096;

  /// Errors: PreconditionViolation (no user message, temperature outside [0, 2]).
  void validate() const;
  bool operator==(const ChatRequest&) const = default;
};

struct Usage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
  long total() const noexcept { return prompt_tokens + completion_tokens; }
  bool operator==(const Usage&) const = default;
};

struct ChatResponse {
  std::string text;
  Usage usage;
  double latency_ms = 0.0;
  bool operator==(const ChatResponse&) const = default;
};

nlohmann::json to_json(const ChatRequest& r);
nlohmann::json to_json(const ChatResponse& r);
ChatRequest request_from_json(const nlohmann::json& j);
ChatResponse response_from_json(const nlohmann::json& j);

/// Hex SHA-256 of the canonical JSON of (model_id, temperature, messages).
std::string fingerprint(const ChatRequest& request);

/// Rough token count used when a provider reports no usage.
long estimate_tokens(std::string_view text);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// Thread-safe. Errors: ProviderError, ReplayMiss.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct CassetteEntry {
  std::string fingerprint;
  ChatRequest request;
  ChatResponse response;
  bool operator==(const CassetteEntry&) const = default;
};

/// Fingerprint-keyed response log kept in insertion order.
class Cassette {
 public:
  const std::vector<CassetteEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const CassetteEntry* find(std::string_view fingerprint) const;
  /// Returns false when the fingerprint is already present with the same
  /// response. Errors: CassetteConflict (same fingerprint, other response).
  bool add(CassetteEntry entry);
  bool operator==(const Cassette&) const = default;

 private:
  std::vector<CassetteEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Errors: CorruptCassette (names the 1-based line), CassetteConflict.
Cassette load_cassette(const std::filesystem::path& path);
void save_cassette(const Cassette& cassette, const std::filesystem::path& path);
/// Union of two cassettes. Errors: CassetteConflict.
Cassette merge_cassettes(const Cassette& a, const Cassette& b);
/// Fingerprints whose stored request no longer hashes to them.
std::vector<std::string> verify_cassette(const Cassette& cassette);
std::string cassette_line(const CassetteEntry& entry);

enum class CassetteMode { replay, replay_or_forward, record };

/// Serves requests from a cassette. In record mode misses are forwarded and
/// appended (to memory and, when a path is set, to the file).
class CassetteBackend final : public ChatBackend {
 public:
  CassetteBackend(Cassette cassette, CassetteMode mode, std::shared_ptr<ChatBackend> upstream = nullptr,
                  std::optional<std::filesystem::path> append_to = std::nullopt);

  ChatResponse complete(const ChatRequest& request) override;
  Cassette snapshot() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  mutable std::mutex mu_;
  Cassette cassette_;
  CassetteMode mode_;
  std::shared_ptr<ChatBackend> upstream_;
  std::optional<std::filesystem::path> append_to_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

struct HttpConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds timeout{120};

  /// Reads SLICEMATE_API_BASE and SLICEMATE_API_KEY.
  static HttpConfig from_env();
};

/// OpenAI-compatible `POST {base}/chat/completions`, retried with exponential
/// backoff on transport errors, 408, 429 and 5xx.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpConfig config);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  HttpConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

/// Run-level token ceiling. Errors: BudgetExceeded from `check`.
class TokenBudget {
 public:
  explicit TokenBudget(long limit = 200000) : limit_(limit) {}
  void check() const;
  void charge(const Usage& usage);
  long used() const;
  long limit() const noexcept { return limit_; }

 private:
  mutable std::mutex mu_;
  long limit_;
  long used_ = 0;
};

/// SLICEMATE_MODEL or the default model id.
std::string model_from_env(const std::string& fallback = "gpt-4o");

}  // namespace agentslice
