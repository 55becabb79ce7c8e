#pragma once

#include <random>
#include <string>
#include <vector>

#include "agentslice/slice.hpp"

namespace agentslice::testing {

/// Small mixed-language workspace used by property tests.
std::vector<FileEntry> property_corpus();

/// Re-spaces a line: changes indentation, inserts or drops blanks between
/// tokens and adds trailing blanks. Non-blank characters keep their order.
std::string mutate_whitespace(const std::string& line, std::mt19937& rng);

}  // namespace agentslice::testing

namespace agentslice::testing {

struct FuzzOutcome {
  int cases = 0;
  int failures = 0;
  std::string first_failure;
};

/// Samples slices from the property corpus, re-spaces every line, realigns
/// and compares the recovered (file, line) set with the sample. Lines whose
/// text is not unique up to whitespace are not sampled (their position is a
/// tie-break choice, covered by dedicated tests).
FuzzOutcome alignment_fuzz(int cases, unsigned seed);

}  // namespace agentslice::testing
