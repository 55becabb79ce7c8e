#pragma once

#include <httplib.h>

#include <atomic>
#include <functional>
#include <string>
#include <thread>

namespace agentslice::testing {

/// Minimal OpenAI-style chat endpoint on 127.0.0.1. `fail_first` requests are
/// answered with `fail_status`; the rest echo a reply built by `reply`.
class FakeOpenAI {
 public:
  using Reply = std::function<std::string(const std::string& last_user_message)>;

  FakeOpenAI(Reply reply, int fail_first = 0, int fail_status = 429);
  ~FakeOpenAI();

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int requests() const { return requests_.load(); }
  std::string last_authorization() const;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  int fail_first_;
  int fail_status_;
  Reply reply_;
  mutable std::mutex mu_;
  std::string auth_;
};

}  // namespace agentslice::testing
