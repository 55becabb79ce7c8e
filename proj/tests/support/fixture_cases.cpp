#include "support/fixture_cases.hpp"

#include <fstream>

#include "support/helpers.hpp"

namespace agentslice::testing {

using nlohmann::json;

namespace {

LineSet groups_of(const json& arr) {
  LineSet out;
  for (const auto& g : arr) {
    for (int l : g.at("lines")) out.emplace(g.at("file").get<std::string>(), l);
  }
  return out;
}

std::set<std::string> plain_texts(const Workspace& ws, const json& arr) {
  std::set<std::string> out;
  for (const auto& [file, line] : groups_of(arr)) out.insert(std::string(*ws.line_text(file, line)));
  return out;
}

}  // namespace

std::map<std::string, std::set<std::string>> texts_of(const Workspace& ws, const LineSet& lines) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [file, line] : lines) out[file].insert(std::string(*ws.line_text(file, line)));
  return out;
}

OracleBackend::Options oracle_options(const json& j, const Workspace& ws) {
  OracleBackend::Options o;
  if (j.contains("noise")) o.noise = plain_texts(ws, j["noise"]);
  if (j.contains("blind")) o.blind = plain_texts(ws, j["blind"]);
  if (j.contains("withheld")) o.withheld = plain_texts(ws, j["withheld"]);
  o.keep_noise = j.value("keep_noise", false);
  o.incomplete_calls = j.value("incomplete_calls", -1);
  if (j.contains("garbage")) {
    for (const auto& [agent, n] : j["garbage"].items()) {
      for (auto kind : {AgentKind::synthesis, AgentKind::expansion, AgentKind::conciseness,
                        AgentKind::completeness, AgentKind::refinement}) {
        if (to_string(kind) == agent) o.garbage[kind] = n.get<int>();
      }
    }
  }
  return o;
}

CaseFixture load_case(const std::filesystem::path& dir) {
  auto doc = json::parse(read_file(dir / "case.json"));
  CaseFixture c;
  c.workspace = std::make_shared<const Workspace>(load_workspace_dir(dir / doc.value("workspace", std::string("workspace"))));
  const auto& crit = doc.at("criterion");
  c.criterion = make_criterion(*c.workspace, crit.at("file").get<std::string>(), crit.at("line").get<int>(),
                               crit.value("variables", std::vector<std::string>{}));
  c.expected = groups_of(doc.at("expected"));
  c.oracle = oracle_options(doc.value("oracle", json::object()), *c.workspace);
  c.target = texts_of(*c.workspace, c.expected);
  return c;
}

Cassette record_case(const CaseFixture& fixture) {
  auto oracle = std::make_shared<OracleBackend>(fixture.target, fixture.oracle);
  auto recorder = std::make_shared<CassetteBackend>(Cassette{}, CassetteMode::record, oracle);
  try {
    run_pipeline(build_index(fixture.workspace), fixture.criterion, recorder);
  } catch (const PipelineError&) {
    // Failing runs are recorded as they are.
  }
  return recorder->snapshot();
}

Cassette record_benchmark(const std::vector<BenchmarkInstance>& instances, const json& oracles) {
  Cassette all;
  for (const auto& inst : instances) {
    auto opts = oracle_options(oracles.value(inst.id, json::object()), *inst.workspace);
    auto oracle = std::make_shared<OracleBackend>(texts_of(*inst.workspace, inst.ground_truth), opts);
    auto recorder = std::make_shared<CassetteBackend>(Cassette{}, CassetteMode::record, oracle);
    try {
      run_pipeline(build_index(inst.workspace), inst.criterion, recorder);
    } catch (const PipelineError&) {
    }
    all = merge_cassettes(all, recorder->snapshot());
  }
  return all;
}

void write_fixture_cassettes(const std::filesystem::path& root, const std::filesystem::path& out) {
  for (const char* name : {"top_three", "recursion", "adversarial"}) {
    save_cassette(record_case(load_case(root / name)), out / name / "cassette.jsonl");
  }
  auto instances = load_benchmark(root / "bench" / "benchmark.json");
  auto oracles = json::parse(read_file(root / "bench" / "oracle.json"));
  save_cassette(record_benchmark(instances, oracles), out / "bench" / "cassette.jsonl");
}

}  // namespace agentslice::testing
