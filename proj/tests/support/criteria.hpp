#pragma once

// Executable acceptance checks, shared by the acceptance binary and the unit
// tests. Each returns a verdict plus a one-line detail.

#include <string>

namespace agentslice::testing {

enum class Verdict { pass, fail, skip };

struct CriterionResult {
  int id = 0;
  std::string name;
  Verdict verdict = Verdict::fail;
  std::string detail;
  double seconds = 0;
};

CriterionResult check_aci_suite();           // 1
CriterionResult check_metrics_oracle();      // 2
CriterionResult check_ratio_oracle();        // 3
CriterionResult check_control_loop_bound();  // 4
CriterionResult check_expansion_termination();  // 5
CriterionResult check_top_three();           // 6
CriterionResult check_alignment_safety();    // 7
CriterionResult check_replay_reproducible(); // 8
CriterionResult check_live_smoke();          // 9

/// "PASS 3 ratio oracle (0.01s): ..."
std::string format_result(const CriterionResult& r);

}  // namespace agentslice::testing
