#pragma once

// Hand-annotated syntax-query fixtures under fixtures/aci/<lang>/NN.

#include <filesystem>
#include <string>
#include <vector>

namespace agentslice::testing {

struct AciCaseResult {
  std::string name;  // "java/03"
  int checks = 0;
  std::vector<std::string> mismatches;
};

/// Runs the four queries of one fixture directory against its expected.json.
AciCaseResult run_aci_case(const std::filesystem::path& dir);

/// Every fixture directory under `root`, sorted.
std::vector<std::filesystem::path> aci_case_dirs(const std::filesystem::path& root);

}  // namespace agentslice::testing
