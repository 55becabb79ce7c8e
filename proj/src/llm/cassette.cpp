#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "agentslice/error.hpp"
#include "agentslice/llm.hpp"

namespace agentslice {

using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::InvariantViolation, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace

void ChatRequest::validate() const {
  if (temperature < 0.0 || temperature > 2.0) {
    fail(ErrorKind::PreconditionViolation, "temperature must lie in [0, 2]");
  }
  for (const auto& m : messages) {
    if (m.role != "system" && m.role != "user" && m.role != "assistant") {
      fail(ErrorKind::PreconditionViolation, "unknown message role " + m.role);
    }
  }
  bool user = false;
  for (const auto& m : messages) user = user || m.role == "user";
  if (!user) fail(ErrorKind::PreconditionViolation, "a request needs a user message");
}

json to_json(const ChatRequest& r) {
  json messages = json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", m.role}, {"text", m.text}});
  return {{"model_id", r.model_id},
          {"temperature", r.temperature},
          {"messages", messages},
          {"max_output", r.max_output}};
}

json to_json(const ChatResponse& r) {
  return {{"text", r.text},
          {"usage", {{"prompt_tokens", r.usage.prompt_tokens}, {"completion_tokens", r.usage.completion_tokens}}},
          {"latency_ms", r.latency_ms}};
}

ChatRequest request_from_json(const json& j) {
  ChatRequest r;
  r.model_id = j.at("model_id").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.max_output = j.value("max_output", 4096);
  for (const auto& m : j.at("messages")) {
    r.messages.push_back({m.at("role").get<std::string>(), m.at("text").get<std::string>()});
  }
  return r;
}

ChatResponse response_from_json(const json& j) {
  ChatResponse r;
  r.text = j.at("text").get<std::string>();
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
    r.usage.completion_tokens = j["usage"].value("completion_tokens", 0L);
  }
  r.latency_ms = j.value("latency_ms", 0.0);
  return r;
}

std::string fingerprint(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"text", m.text}});
  // Object keys are sorted, so this dump is canonical.
  json canonical = {{"model_id", request.model_id},
                    {"temperature", request.temperature},
                    {"messages", messages}};
  return sha256_hex(dump(canonical));
}

long estimate_tokens(std::string_view text) { return static_cast<long>((text.size() + 3) / 4); }

const CassetteEntry* Cassette::find(std::string_view fp) const {
  auto it = index_.find(fp);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool Cassette::add(CassetteEntry entry) {
  if (const auto* existing = find(entry.fingerprint)) {
    if (existing->response.text != entry.response.text) {
      fail(ErrorKind::CassetteConflict, "fingerprint " + entry.fingerprint + " has two different responses");
    }
    return false;
  }
  index_.emplace(entry.fingerprint, entries_.size());
  entries_.push_back(std::move(entry));
  return true;
}

std::string cassette_line(const CassetteEntry& e) {
  return dump(json{{"fingerprint", e.fingerprint},
                   {"request", to_json(e.request)},
                   {"response", to_json(e.response)}});
}

Cassette load_cassette(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::CorruptCassette, "cannot open " + path.string());
  Cassette cassette;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = path.string() + ":" + std::to_string(number);
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorKind::CorruptCassette, where + ": not a JSON object");
    CassetteEntry entry;
    try {
      entry.fingerprint = j.at("fingerprint").get<std::string>();
      entry.request = request_from_json(j.at("request"));
      entry.response = response_from_json(j.at("response"));
    } catch (const json::exception& e) {
      fail(ErrorKind::CorruptCassette, where + ": " + e.what());
    }
    cassette.add(std::move(entry));
  }
  return cassette;
}

void save_cassette(const Cassette& cassette, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::CorruptCassette, "cannot write " + tmp.string());
    for (const auto& e : cassette.entries()) out << cassette_line(e) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

Cassette merge_cassettes(const Cassette& a, const Cassette& b) {
  Cassette out = a;
  for (const auto& e : b.entries()) out.add(e);
  return out;
}

std::vector<std::string> verify_cassette(const Cassette& cassette) {
  std::vector<std::string> bad;
  for (const auto& e : cassette.entries()) {
    if (fingerprint(e.request) != e.fingerprint) bad.push_back(e.fingerprint);
  }
  return bad;
}

CassetteBackend::CassetteBackend(Cassette cassette, CassetteMode mode,
                                 std::shared_ptr<ChatBackend> upstream,
                                 std::optional<std::filesystem::path> append_to)
    : cassette_(std::move(cassette)),
      mode_(mode),
      upstream_(std::move(upstream)),
      append_to_(std::move(append_to)) {
  if (mode_ != CassetteMode::replay && !upstream_) {
    fail(ErrorKind::PreconditionViolation, "record and forward modes need an upstream backend");
  }
}

ChatResponse CassetteBackend::complete(const ChatRequest& request) {
  request.validate();
  auto fp = fingerprint(request);
  {
    std::lock_guard lock(mu_);
    if (const auto* hit = cassette_.find(fp)) {
      ++hits_;
      return hit->response;
    }
    ++misses_;
    if (mode_ == CassetteMode::replay) {
      fail(ErrorKind::ReplayMiss, "no cassette entry for request " + fp.substr(0, 16));
    }
  }
  auto response = upstream_->complete(request);
  if (mode_ == CassetteMode::record) {
    std::lock_guard lock(mu_);
    CassetteEntry entry{fp, request, response};
    if (cassette_.add(entry) && append_to_) {
      if (append_to_->has_parent_path()) std::filesystem::create_directories(append_to_->parent_path());
      std::ofstream out(*append_to_, std::ios::binary | std::ios::app);
      out << cassette_line(entry) << '\n';
    }
  }
  return response;
}

Cassette CassetteBackend::snapshot() const {
  std::lock_guard lock(mu_);
  return cassette_;
}

std::size_t CassetteBackend::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::size_t CassetteBackend::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

void TokenBudget::check() const {
  std::lock_guard lock(mu_);
  if (used_ >= limit_) {
    fail(ErrorKind::BudgetExceeded, "token budget of " + std::to_string(limit_) + " spent (" +
                                        std::to_string(used_) + " used)");
  }
}

void TokenBudget::charge(const Usage& usage) {
  std::lock_guard lock(mu_);
  used_ += usage.total();
}

long TokenBudget::used() const {
  std::lock_guard lock(mu_);
  return used_;
}

}  // namespace agentslice
