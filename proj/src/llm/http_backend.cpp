#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "agentslice/error.hpp"
#include "agentslice/llm.hpp"

namespace agentslice {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

bool retryable(int status) { return status == 408 || status == 429 || (status >= 500 && status <= 599); }

}  // namespace

HttpConfig HttpConfig::from_env() {
  HttpConfig c;
  c.base_url = env_or("SLICEMATE_API_BASE", c.base_url);
  c.api_key = env_or("SLICEMATE_API_KEY", "");
  return c;
}

std::string model_from_env(const std::string& fallback) { return env_or("SLICEMATE_MODEL", fallback); }

HttpChatBackend::HttpChatBackend(HttpConfig config) : config_(std::move(config)) {
  auto& url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  auto scheme = url.find("://");
  if (scheme == std::string::npos) fail(ErrorKind::PreconditionViolation, "API base needs a scheme: " + url);
  auto slash = url.find('/', scheme + 3);
  scheme_host_port_ = url.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : url.substr(slash);
}

ChatResponse HttpChatBackend::complete(const ChatRequest& request) {
  request.validate();
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.text}});
  json body = {{"model", request.model_id},
               {"temperature", request.temperature},
               {"messages", messages},
               {"max_tokens", request.max_output}};
  auto payload = body.dump(-1, ' ', false, json::error_handler_t::replace);

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  auto delay = config_.initial_backoff;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, payload, "application/json");
    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (retryable(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      fail(ErrorKind::ProviderError, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
    }
    auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
      fail(ErrorKind::ProviderError, "malformed chat completion body");
    }
    ChatResponse out;
    const auto& message = j["choices"][0].value("message", json::object());
    if (message.contains("content") && message["content"].is_string()) {
      out.text = message["content"].get<std::string>();
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      out.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
      out.usage.completion_tokens = j["usage"].value("completion_tokens", 0L);
    } else {
      for (const auto& m : request.messages) out.usage.prompt_tokens += estimate_tokens(m.text);
      out.usage.completion_tokens = estimate_tokens(out.text);
    }
    out.latency_ms = elapsed.count();
    return out;
  }
  fail(ErrorKind::ProviderError, "giving up after " + std::to_string(config_.max_retries) +
                                     " retries: " + last_error);
}

}  // namespace agentslice
