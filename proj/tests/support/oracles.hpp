#pragma once

// Independent reference implementations used to check the eval module.

#include <cstdint>
#include <random>
#include <vector>

#include "agentslice/eval.hpp"

namespace agentslice::testing {

struct BruteCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, f1 = 0, accuracy = 0;
  bool exact = true;
};

/// Classifies universe lines one by one from membership flags.
BruteCounts brute_force_score(int universe_lines, const std::vector<bool>& in_universe,
                              const std::vector<bool>& gt, const std::vector<bool>& pred);

struct MetricsTriple {
  int lines = 0;  // file has lines 1..lines
  std::vector<bool> in_universe, gt, pred;  // indexed by line, slot 0 unused
  LineSet universe_set() const;
  LineSet gt_set() const;
  LineSet pred_set() const;
};

/// Random (universe, gt, pred) with at most `max_lines` lines; predictions may
/// fall outside the universe.
MetricsTriple random_triple(std::mt19937& rng, int max_lines);

struct RatioCase {
  LineSet slice, buggy;
  bool hit_one = false, hit_all = false;  // decided while generating
};
RatioCase random_ratio_case(std::mt19937& rng);

}  // namespace agentslice::testing
