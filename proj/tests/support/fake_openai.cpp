#include "support/fake_openai.hpp"

#include <json.hpp>

namespace agentslice::testing {

FakeOpenAI::FakeOpenAI(Reply reply, int fail_first, int fail_status)
    : fail_first_(fail_first), fail_status_(fail_status), reply_(std::move(reply)) {
  server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    int n = requests_++;
    {
      std::lock_guard lock(mu_);
      auth_ = req.get_header_value("Authorization");
    }
    if (n < fail_first_) {
      res.status = fail_status_;
      res.set_content("{\"error\":\"busy\"}", "application/json");
      return;
    }
    auto body = nlohmann::json::parse(req.body);
    std::string last;
    for (const auto& m : body["messages"]) {
      if (m["role"] == "user") last = m["content"].get<std::string>();
    }
    nlohmann::json out = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", reply_(last)}}}}}},
        {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}};
    res.set_content(out.dump(), "application/json");
  });
  port_ = server_.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
}

FakeOpenAI::~FakeOpenAI() {
  server_.stop();
  if (thread_.joinable()) thread_.join();
}

std::string FakeOpenAI::last_authorization() const {
  std::lock_guard lock(mu_);
  return auth_;
}

}  // namespace agentslice::testing
