#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "agentslice/error.hpp"
#include "agentslice/llm.hpp"
#include "support/fake_openai.hpp"
#include "support/helpers.hpp"

using namespace agentslice;
using agentslice::testing::FakeOpenAI;
using agentslice::testing::temp_dir;

namespace {

ChatRequest request(const std::string& text) {
  ChatRequest r;
  r.messages = {{"user", text}};
  return r;
}

class Counting final : public ChatBackend {
 public:
  ChatResponse complete(const ChatRequest& r) override {
    ++calls;
    return {"echo:" + r.messages.back().text, {3, 2}, 1.5};
  }
  std::atomic<int> calls{0};
};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvariantViolation;
}

}  // namespace

TEST(Llm, RequestValidation) {
  ChatRequest r;
  EXPECT_EQ(kind_of([&] { r.validate(); }), ErrorKind::PreconditionViolation);
  r = request("x");
  r.temperature = 2.5;
  EXPECT_EQ(kind_of([&] { r.validate(); }), ErrorKind::PreconditionViolation);
  EXPECT_EQ(ChatRequest{}.temperature, 0.0);
}

TEST(Llm, FingerprintCanonicalAndSensitive) {
  auto a = request("hello");
  auto j = nlohmann::json::parse(to_json(a).dump(4));  // re-serialized with other spacing
  EXPECT_EQ(fingerprint(request_from_json(j)), fingerprint(a));
  EXPECT_EQ(fingerprint(a).size(), 64u);
  auto b = a;
  b.max_output = 17;  // not part of the fingerprint
  EXPECT_EQ(fingerprint(b), fingerprint(a));
  b.temperature = 0.5;
  EXPECT_NE(fingerprint(b), fingerprint(a));
  auto c = a;
  c.messages[0].text += " ";
  EXPECT_NE(fingerprint(c), fingerprint(a));
}

TEST(Llm, ReplayHitAndStrictMiss) {
  Cassette cassette;
  auto r = request("q");
  cassette.add({fingerprint(r), r, {"stored", {1, 1}, 0}});
  CassetteBackend replay(cassette, CassetteMode::replay);
  EXPECT_EQ(replay.complete(r).text, "stored");
  EXPECT_EQ(kind_of([&] { replay.complete(request("other")); }), ErrorKind::ReplayMiss);
}

TEST(Llm, RecordDedupesAndAppends) {
  auto dir = temp_dir("rec");
  auto path = dir / "c.jsonl";
  auto upstream = std::make_shared<Counting>();
  CassetteBackend rec(Cassette{}, CassetteMode::record, upstream, path);
  rec.complete(request("a"));
  rec.complete(request("a"));
  rec.complete(request("b"));
  EXPECT_EQ(upstream->calls, 2);
  EXPECT_EQ(rec.snapshot().size(), 2u);
  auto loaded = load_cassette(path);
  EXPECT_EQ(loaded, rec.snapshot());
  std::filesystem::remove_all(dir);
}

TEST(Llm, ConcurrentRecordIsSerialized) {
  auto upstream = std::make_shared<Counting>();
  CassetteBackend rec(Cassette{}, CassetteMode::record, upstream);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) rec.complete(request("q" + std::to_string((t * 25 + i) % 50)));
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(rec.snapshot().size(), 50u);
  EXPECT_TRUE(verify_cassette(rec.snapshot()).empty());
}

TEST(Llm, CassetteFiles) {
  auto dir = temp_dir("cas");
  Cassette c;
  for (int i = 0; i < 5; ++i) {
    auto r = request("m" + std::to_string(i) + " \"quoted\"\n\tunicode: \xc3\xa9");
    c.add({fingerprint(r), r, {"resp" + std::to_string(i), {i, 2 * i}, 0.25 * i}});
  }
  save_cassette(c, dir / "x.jsonl");
  EXPECT_EQ(load_cassette(dir / "x.jsonl"), c);

  std::ofstream(dir / "empty.jsonl").close();
  EXPECT_EQ(load_cassette(dir / "empty.jsonl").size(), 0u);

  {
    std::ofstream out(dir / "bad.jsonl");
    out << cassette_line(c.entries()[0]) << "\n" << cassette_line(c.entries()[1]).substr(0, 40) << "\n";
  }
  try {
    load_cassette(dir / "bad.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CorruptCassette);
    EXPECT_NE(std::string(e.what()).find("bad.jsonl:2"), std::string::npos) << e.what();
  }
  std::filesystem::remove_all(dir);
}

TEST(Llm, MergeAndConflicts) {
  Cassette a, b;
  auto r1 = request("1"), r2 = request("2");
  a.add({fingerprint(r1), r1, {"one", {}, 0}});
  b.add({fingerprint(r2), r2, {"two", {}, 0}});
  EXPECT_EQ(merge_cassettes(a, b).size(), 2u);
  Cassette clash;
  clash.add({fingerprint(r1), r1, {"uno", {}, 0}});
  EXPECT_EQ(kind_of([&] { merge_cassettes(a, clash); }), ErrorKind::CassetteConflict);
  Cassette tampered;
  auto bad = r1;
  bad.messages[0].text = "changed";
  tampered.add({fingerprint(r1), bad, {"x", {}, 0}});
  EXPECT_EQ(verify_cassette(tampered).size(), 1u);
}

TEST(Llm, Budget) {
  TokenBudget budget(10);
  budget.check();
  budget.charge({6, 5});
  EXPECT_EQ(budget.used(), 11);
  EXPECT_EQ(kind_of([&] { budget.check(); }), ErrorKind::BudgetExceeded);
}

TEST(Http, CompletesAgainstLocalServer) {
  FakeOpenAI server([](const std::string& msg) { return "reply to " + msg; });
  HttpConfig cfg;
  cfg.base_url = server.base_url();
  cfg.api_key = "k-123";
  cfg.initial_backoff = std::chrono::milliseconds(1);
  HttpChatBackend http(cfg);
  auto resp = http.complete(request("hi"));
  EXPECT_EQ(resp.text, "reply to hi");
  EXPECT_EQ(resp.usage.total(), 18);
  EXPECT_EQ(server.last_authorization(), "Bearer k-123");
}

TEST(Http, RetriesRateLimitsThenSucceeds) {
  FakeOpenAI server([](const std::string&) { return "ok"; }, 3, 429);
  HttpConfig cfg;
  cfg.base_url = server.base_url();
  cfg.initial_backoff = std::chrono::milliseconds(1);
  HttpChatBackend http(cfg);
  EXPECT_EQ(http.complete(request("x")).text, "ok");
  EXPECT_EQ(server.requests(), 4);
}

TEST(Http, GivesUpAfterThreeRetries) {
  FakeOpenAI server([](const std::string&) { return "never"; }, 100, 503);
  HttpConfig cfg;
  cfg.base_url = server.base_url();
  cfg.initial_backoff = std::chrono::milliseconds(1);
  HttpChatBackend http(cfg);
  EXPECT_EQ(kind_of([&] { http.complete(request("x")); }), ErrorKind::ProviderError);
  EXPECT_EQ(server.requests(), 4);
}

TEST(Http, NonRetryableStatusFailsFast) {
  FakeOpenAI server([](const std::string&) { return "never"; }, 100, 401);
  HttpConfig cfg;
  cfg.base_url = server.base_url();
  cfg.initial_backoff = std::chrono::milliseconds(1);
  HttpChatBackend http(cfg);
  EXPECT_EQ(kind_of([&] { http.complete(request("x")); }), ErrorKind::ProviderError);
  EXPECT_EQ(server.requests(), 1);
}

TEST(Http, RecordModeThroughHttp) {
  FakeOpenAI server([](const std::string& msg) { return "r:" + msg; });
  HttpConfig cfg;
  cfg.base_url = server.base_url();
  auto http = std::make_shared<HttpChatBackend>(cfg);
  CassetteBackend rec(Cassette{}, CassetteMode::record, http);
  rec.complete(request("a"));
  rec.complete(request("a"));
  EXPECT_EQ(server.requests(), 1);
  CassetteBackend replay(rec.snapshot(), CassetteMode::replay);
  EXPECT_EQ(replay.complete(request("a")).text, "r:a");
}
