#pragma once

// Bundled end-to-end fixtures and the scripted oracles that recorded their
// cassettes.

#include <filesystem>
#include <memory>

#include "agentslice/eval.hpp"
#include "agentslice/llm.hpp"
#include "support/fake_agents.hpp"

namespace agentslice::testing {

struct CaseFixture {
  std::shared_ptr<const Workspace> workspace;
  SlicingCriterion criterion;
  LineSet expected;
  OracleBackend::Options oracle;
  std::map<std::string, std::set<std::string>> target;
};

/// Reads `<dir>/case.json` and the sources under `<dir>/workspace` (or the
/// directory named by its "workspace" key).
CaseFixture load_case(const std::filesystem::path& dir);

OracleBackend::Options oracle_options(const nlohmann::json& j, const Workspace& ws);
std::map<std::string, std::set<std::string>> texts_of(const Workspace& ws, const LineSet& lines);

/// Runs the pipeline against the case's oracle and keeps every exchange.
Cassette record_case(const CaseFixture& fixture);
/// Same for every benchmark instance, in order; `oracles` maps ids to options.
Cassette record_benchmark(const std::vector<BenchmarkInstance>& instances, const nlohmann::json& oracles);

/// Regenerates the cassettes of `top_three`, `recursion`, `adversarial` and
/// `bench` under `out` from the fixtures under `root`.
void write_fixture_cassettes(const std::filesystem::path& root, const std::filesystem::path& out);

}  // namespace agentslice::testing
