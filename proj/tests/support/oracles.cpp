#include "support/oracles.hpp"

namespace agentslice::testing {

BruteCounts brute_force_score(int universe_lines, const std::vector<bool>& in_universe,
                              const std::vector<bool>& gt, const std::vector<bool>& pred) {
  BruteCounts c;
  long size = 0;
  for (int l = 1; l <= universe_lines; ++l) {
    if (!in_universe[l]) continue;
    ++size;
    if (gt[l] && pred[l]) ++c.tp;
    if (!gt[l] && pred[l]) ++c.fp;
    if (gt[l] && !pred[l]) ++c.fn;
    if (!gt[l] && !pred[l]) ++c.tn;
    if (gt[l] != pred[l]) c.exact = false;
  }
  c.precision = c.tp + c.fp > 0 ? double(c.tp) / double(c.tp + c.fp) : 0.0;
  c.recall = c.tp + c.fn > 0 ? double(c.tp) / double(c.tp + c.fn) : 0.0;
  c.f1 = c.precision > 0 || c.recall > 0 ? 2 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
  c.accuracy = size > 0 ? double(c.tp + c.tn) / double(size) : 0.0;
  return c;
}

namespace {
LineSet collect(const std::vector<bool>& flags) {
  LineSet out;
  for (std::size_t l = 1; l < flags.size(); ++l) {
    if (flags[l]) out.emplace("f.py", static_cast<int>(l));
  }
  return out;
}
}  // namespace

LineSet MetricsTriple::universe_set() const { return collect(in_universe); }
LineSet MetricsTriple::gt_set() const { return collect(gt); }
LineSet MetricsTriple::pred_set() const { return collect(pred); }

MetricsTriple random_triple(std::mt19937& rng, int max_lines) {
  MetricsTriple t;
  t.lines = std::uniform_int_distribution<int>(1, max_lines)(rng);
  std::uniform_real_distribution<double> u(0, 1);
  double p_univ = u(rng), p_gt = u(rng), p_pred = u(rng);
  t.in_universe.assign(t.lines + 1, false);
  t.gt.assign(t.lines + 1, false);
  t.pred.assign(t.lines + 1, false);
  for (int l = 1; l <= t.lines; ++l) {
    t.in_universe[l] = u(rng) < p_univ;
    t.gt[l] = t.in_universe[l] && u(rng) < p_gt;
    t.pred[l] = u(rng) < p_pred;
  }
  return t;
}

RatioCase random_ratio_case(std::mt19937& rng) {
  RatioCase c;
  std::uniform_int_distribution<int> line(1, 60);
  int nbuggy = std::uniform_int_distribution<int>(1, 4)(rng);
  while (static_cast<int>(c.buggy.size()) < nbuggy) c.buggy.emplace("b.java", line(rng));
  int mode = std::uniform_int_distribution<int>(0, 2)(rng);  // none, some, all
  for (int i = 0; i < 10; ++i) {
    LineRef r{"b.java", line(rng)};
    if (!c.buggy.contains(r)) c.slice.insert(r);
  }
  std::size_t taken = 0;
  for (const auto& b : c.buggy) {
    bool take = mode == 2 || (mode == 1 && taken == 0);
    if (take) {
      c.slice.insert(b);
      ++taken;
    }
  }
  c.hit_one = taken >= 1;
  c.hit_all = taken == c.buggy.size();
  return c;
}

}  // namespace agentslice::testing
