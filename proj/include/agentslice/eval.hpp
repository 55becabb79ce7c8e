#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agentslice/agents.hpp"
#include "agentslice/slice.hpp"
#include "agentslice/workspace.hpp"

namespace agentslice {

using LineRef = std::pair<std::string, int>;
using LineSet = std::set<LineRef>;

struct BenchmarkInstance {
  std::string id;
  Language language = Language::python;
  std::shared_ptr<const Workspace> workspace;
  SlicingCriterion criterion;
  LineSet ground_truth;
  std::string source_tag;  // "codenet" or "github"
  std::optional<LineSet> buggy_lines;
};

/// Errors: SchemaError, naming the JSON pointer of the offending value.
std::vector<BenchmarkInstance> parse_benchmark(const nlohmann::json& doc);
/// Errors: SchemaError (also for unreadable files and bad JSON).
std::vector<BenchmarkInstance> load_benchmark(const std::filesystem::path& path);
nlohmann::json benchmark_to_json(const std::vector<BenchmarkInstance>& instances);

/// Lines that count for scoring: not blank, not comment-only, not delimiter-only.
LineSet statement_universe(const Workspace& workspace);
inline LineSet statement_universe(const BenchmarkInstance& instance) {
  return statement_universe(*instance.workspace);
}

struct ConfusionCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct MetricsRow {
  std::string id;
  std::string language;
  std::string source_tag;
  ConfusionCounts counts;
  double precision = 0, recall = 0, f1 = 0, accuracy = 0;
  bool exact_match = false;
  std::vector<std::string> warnings;  // predicted lines dropped as outside the universe
};

/// Confusion counts over `universe`; predicted and truth lines outside it are
/// ignored (predicted ones with a warning).
MetricsRow score_lines(const LineSet& universe, const LineSet& ground_truth, const LineSet& predicted);
MetricsRow score_instance(const LineSet& predicted, const BenchmarkInstance& instance);
MetricsRow score_instance(const Slice& predicted, const BenchmarkInstance& instance);

struct RatioMetrics {
  double ratio_1 = 0;
  double ratio_all = 0;
  std::size_t n = 0;
};

/// Errors: MissingBuggyLines (an instance without buggy lines),
/// PreconditionViolation (no instances).
RatioMetrics ratio_metrics(const std::vector<std::pair<LineSet, LineSet>>& slice_and_buggy);

struct GroupRow {
  std::string group;  // "<language>/<source_tag>" or "all"
  std::size_t n = 0;
  double precision = 0, recall = 0, f1 = 0, accuracy = 0, acc_em = 0;
};

struct Summary {
  std::vector<GroupRow> groups;  // sorted by name, "all" last
  std::optional<RatioMetrics> ratios;
};

/// Unweighted per-instance means. Errors: PreconditionViolation (no rows).
Summary aggregate(const std::vector<MetricsRow>& rows);

enum class ReportFormat { json, csv, markdown };
std::optional<ReportFormat> parse_report_format(std::string_view name);

/// CSV columns: group,n,precision,recall,f1,accuracy,acc_em.
std::string emit_report(const Summary& summary, ReportFormat format);
nlohmann::json summary_to_json(const Summary& summary);
Summary summary_from_json(const nlohmann::json& j);
nlohmann::json row_to_json(const MetricsRow& row);

// --- batch runs ------------------------------------------------------------

struct InstanceOutcome {
  std::string id;
  bool ok = false;
  std::string error;  // "Kind: message" when !ok
  std::optional<Slice> slice;  // final slice, or the last valid one on failure
  std::vector<AgentStep> transcript;
  SessionCounters counters;
  long tokens = 0;
  double elapsed_ms = 0;
};

/// Runs the pipeline on every instance with at most `workers` sessions at a
/// time. Outcomes come back in instance order.
std::vector<InstanceOutcome> run_instances(const std::vector<BenchmarkInstance>& instances,
                                           std::shared_ptr<ChatBackend> backend, const SessionConfig& config,
                                           const PromptLibrary& prompts, int workers);

/// Scored instance set. Missing or failed predictions score as empty slices.
struct Evaluation {
  std::vector<MetricsRow> rows;
  Summary summary;
};
Evaluation evaluate(const std::vector<BenchmarkInstance>& instances, const std::vector<std::optional<LineSet>>& predictions);

LineSet to_line_set(const Slice& slice);

}  // namespace agentslice
