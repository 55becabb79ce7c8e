// Prints one PASS/FAIL line per acceptance criterion; exits 1 on any FAIL.
// Criterion 9 prints SKIP when no API key is configured.

#include <iostream>

#include "support/criteria.hpp"

using namespace agentslice::testing;

int main() {
  using Check = CriterionResult (*)();
  const Check checks[] = {check_aci_suite,           check_metrics_oracle,        check_ratio_oracle,
                          check_control_loop_bound,  check_expansion_termination, check_top_three,
                          check_alignment_safety,    check_replay_reproducible,   check_live_smoke};
  int failed = 0;
  int id = 0;
  for (auto check : checks) {
    ++id;
    CriterionResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), Verdict::fail, std::string("threw: ") + e.what(), 0};
    }
    failed += r.verdict == Verdict::fail;
    std::cout << format_result(r) << std::endl;
  }
  return failed ? 1 : 0;
}
