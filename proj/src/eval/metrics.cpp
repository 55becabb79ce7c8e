#include <algorithm>
#include <cstdio>
#include <map>

#include "agentslice/eval.hpp"

namespace agentslice {

using nlohmann::json;

LineSet to_line_set(const Slice& slice) {
  LineSet out;
  for (const auto& l : slice.lines()) out.emplace(l.file, l.line);
  return out;
}

MetricsRow score_lines(const LineSet& universe, const LineSet& ground_truth, const LineSet& predicted) {
  MetricsRow row;
  LineSet pred, gt;
  for (const auto& p : predicted) {
    if (universe.contains(p)) {
      pred.insert(p);
    } else {
      row.warnings.push_back("predicted line " + p.first + ":" + std::to_string(p.second) +
                             " is outside the statement universe");
    }
  }
  for (const auto& g : ground_truth) {
    if (universe.contains(g)) gt.insert(g);
  }
  auto& c = row.counts;
  for (const auto& p : pred) (gt.contains(p) ? c.tp : c.fp)++;
  for (const auto& g : gt) {
    if (!pred.contains(g)) ++c.fn;
  }
  c.tn = static_cast<long>(universe.size()) - c.tp - c.fp - c.fn;
  row.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  row.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  row.f1 = row.precision + row.recall == 0 ? 0.0 : 2 * row.precision * row.recall / (row.precision + row.recall);
  row.accuracy = universe.empty() ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(universe.size());
  row.exact_match = pred == gt;
  return row;
}

MetricsRow score_instance(const LineSet& predicted, const BenchmarkInstance& instance) {
  auto row = score_lines(statement_universe(instance), instance.ground_truth, predicted);
  row.id = instance.id;
  row.language = std::string(to_string(instance.language));
  row.source_tag = instance.source_tag;
  return row;
}

MetricsRow score_instance(const Slice& predicted, const BenchmarkInstance& instance) {
  return score_instance(to_line_set(predicted), instance);
}

RatioMetrics ratio_metrics(const std::vector<std::pair<LineSet, LineSet>>& slice_and_buggy) {
  if (slice_and_buggy.empty()) fail(ErrorKind::PreconditionViolation, "ratio metrics need at least one instance");
  std::size_t one = 0, all = 0;
  for (std::size_t i = 0; i < slice_and_buggy.size(); ++i) {
    const auto& [slice, buggy] = slice_and_buggy[i];
    if (buggy.empty()) fail(ErrorKind::MissingBuggyLines, "instance " + std::to_string(i) + " has no buggy lines");
    std::size_t hit = 0;
    for (const auto& b : buggy) hit += slice.contains(b) ? 1 : 0;
    if (hit >= 1) ++one;
    if (hit == buggy.size()) ++all;
  }
  double n = static_cast<double>(slice_and_buggy.size());
  return {static_cast<double>(one) / n, static_cast<double>(all) / n, slice_and_buggy.size()};
}

Summary aggregate(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) fail(ErrorKind::PreconditionViolation, "nothing to aggregate");
  std::map<std::string, std::vector<const MetricsRow*>> groups;
  for (const auto& r : rows) groups[r.language + "/" + r.source_tag].push_back(&r);
  auto mean = [](const std::string& name, const std::vector<const MetricsRow*>& members) {
    GroupRow g;
    g.group = name;
    g.n = members.size();
    for (const auto* r : members) {
      g.precision += r->precision;
      g.recall += r->recall;
      g.f1 += r->f1;
      g.accuracy += r->accuracy;
      g.acc_em += r->exact_match ? 1.0 : 0.0;
    }
    double n = static_cast<double>(members.size());
    g.precision /= n;
    g.recall /= n;
    g.f1 /= n;
    g.accuracy /= n;
    g.acc_em /= n;
    return g;
  };
  Summary s;
  std::vector<const MetricsRow*> everything;
  for (const auto& r : rows) everything.push_back(&r);
  for (const auto& [name, members] : groups) s.groups.push_back(mean(name, members));
  s.groups.push_back(mean("all", everything));
  return s;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  return std::nullopt;
}

json summary_to_json(const Summary& s) {
  json groups = json::array();
  for (const auto& g : s.groups) {
    groups.push_back({{"group", g.group},
                      {"n", g.n},
                      {"precision", g.precision},
                      {"recall", g.recall},
                      {"f1", g.f1},
                      {"accuracy", g.accuracy},
                      {"acc_em", g.acc_em}});
  }
  json out = {{"groups", groups}};
  if (s.ratios) {
    out["ratios"] = {{"n", s.ratios->n}, {"ratio_1", s.ratios->ratio_1}, {"ratio_all", s.ratios->ratio_all}};
  }
  return out;
}

Summary summary_from_json(const json& j) {
  Summary s;
  for (const auto& g : j.at("groups")) {
    s.groups.push_back({g.at("group").get<std::string>(), g.at("n").get<std::size_t>(),
                        g.at("precision").get<double>(), g.at("recall").get<double>(), g.at("f1").get<double>(),
                        g.at("accuracy").get<double>(), g.at("acc_em").get<double>()});
  }
  if (auto it = j.find("ratios"); it != j.end()) {
    s.ratios = RatioMetrics{it->at("ratio_1").get<double>(), it->at("ratio_all").get<double>(),
                            it->at("n").get<std::size_t>()};
  }
  return s;
}

json row_to_json(const MetricsRow& r) {
  return {{"id", r.id},
          {"language", r.language},
          {"source_tag", r.source_tag},
          {"tp", r.counts.tp},
          {"fp", r.counts.fp},
          {"fn", r.counts.fn},
          {"tn", r.counts.tn},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"accuracy", r.accuracy},
          {"exact_match", r.exact_match},
          {"warnings", r.warnings}};
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string emit_report(const Summary& s, ReportFormat format) {
  switch (format) {
    case ReportFormat::json:
      return summary_to_json(s).dump(2) + "\n";
    case ReportFormat::csv: {
      std::string out = "group,n,precision,recall,f1,accuracy,acc_em\n";
      for (const auto& g : s.groups) {
        out += g.group + "," + std::to_string(g.n) + "," + fixed(g.precision) + "," + fixed(g.recall) + "," +
               fixed(g.f1) + "," + fixed(g.accuracy) + "," + fixed(g.acc_em) + "\n";
      }
      return out;
    }
    case ReportFormat::markdown: {
      std::string out = "| Group | N | Prec. | Rec. | F1 | Acc-EM | Acc. |\n|---|---:|---:|---:|---:|---:|---:|\n";
      for (const auto& g : s.groups) {
        out += "| " + g.group + " | " + std::to_string(g.n) + " | " + fixed(g.precision) + " | " +
               fixed(g.recall) + " | " + fixed(g.f1) + " | " + fixed(g.acc_em) + " | " + fixed(g.accuracy) + " |\n";
      }
      if (s.ratios) {
        out += "\n| Ratio_1 | Ratio_All | N |\n|---:|---:|---:|\n| " + fixed(s.ratios->ratio_1) + " | " +
               fixed(s.ratios->ratio_all) + " | " + std::to_string(s.ratios->n) + " |\n";
      }
      return out;
    }
  }
  return {};
}

Evaluation evaluate(const std::vector<BenchmarkInstance>& instances,
                    const std::vector<std::optional<LineSet>>& predictions) {
  if (instances.size() != predictions.size()) {
    fail(ErrorKind::PreconditionViolation, "one prediction slot per instance is required");
  }
  Evaluation ev;
  std::vector<std::pair<LineSet, LineSet>> ratio_input;
  bool all_buggy = !instances.empty();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    LineSet pred = predictions[i].value_or(LineSet{});
    ev.rows.push_back(score_instance(pred, instances[i]));
    if (!predictions[i]) ev.rows.back().warnings.push_back("no prediction; scored as an empty slice");
    if (instances[i].buggy_lines) {
      ratio_input.emplace_back(pred, *instances[i].buggy_lines);
    } else {
      all_buggy = false;
    }
  }
  ev.summary = aggregate(ev.rows);
  if (all_buggy) ev.summary.ratios = ratio_metrics(ratio_input);
  return ev;
}

}  // namespace agentslice
