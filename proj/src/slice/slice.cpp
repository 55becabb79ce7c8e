#include "agentslice/slice.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cstdlib>
#include <tuple>

#include "agentslice/error.hpp"
#include "agentslice/lexical.hpp"

namespace agentslice {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string without_spaces(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!is_space(c)) out += c;
  }
  return out;
}

void erase_all(std::string& s, std::string_view marker) {
  for (auto pos = s.find(marker); pos != std::string::npos; pos = s.find(marker, pos)) {
    s.erase(pos, marker.size());
  }
}

}  // namespace

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending = false;
  for (char c : text) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

bool is_non_semantic(std::string_view text, std::optional<Language> lang) {
  std::string s = lang ? lexical::strip_line_comment(text, *lang) : std::string(text);
  for (std::string_view marker : {"/*", "*/", "//", "#"}) erase_all(s, marker);
  return std::all_of(s.begin(), s.end(), [](char c) {
    return is_space(c) || std::string_view("(){}[]:;,").find(c) != std::string_view::npos;
  });
}

std::string normalize_line(std::string_view text, std::optional<Language> lang) {
  if (is_non_semantic(text, lang)) return {};
  return collapse_whitespace(text);
}

Slice::Slice(SlicingCriterion criterion) : criterion_(std::move(criterion)) {
  lines_.insert({criterion_.file, criterion_.line, criterion_.statement_text});
}

bool Slice::contains(std::string_view file, int line) const {
  return lines_.contains(SliceLine{std::string(file), line, {}});
}

void Slice::insert(SliceLine line) { lines_.insert(std::move(line)); }

bool Slice::erase(std::string_view file, int line) {
  if (file == criterion_.file && line == criterion_.line) return false;
  return lines_.erase(SliceLine{std::string(file), line, {}}) > 0;
}

std::vector<std::pair<std::string, int>> Slice::refs() const {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& l : lines_) out.emplace_back(l.file, l.line);
  return out;
}

bool Slice::operator==(const Slice& o) const {
  if (criterion_.file != o.criterion_.file || criterion_.line != o.criterion_.line ||
      criterion_.variables != o.criterion_.variables || lines_.size() != o.lines_.size()) {
    return false;
  }
  return std::equal(lines_.begin(), lines_.end(), o.lines_.begin(),
                    [](const SliceLine& a, const SliceLine& b) { return a == b && a.text == b.text; });
}

Slice merge_slices(const Slice& a, const Slice& b) {
  const auto& ca = a.criterion();
  const auto& cb = b.criterion();
  if (ca.file != cb.file || ca.line != cb.line || ca.variables != cb.variables) {
    fail(ErrorKind::CriterionMismatch, "cannot merge slices of " + ca.file + ":" +
                                           std::to_string(ca.line) + " and " + cb.file + ":" +
                                           std::to_string(cb.line));
  }
  Slice out = a;
  for (const auto& l : b.lines()) out.insert(l);
  return out;
}

LineLocator::LineLocator(const Workspace& workspace) : workspace_(&workspace) {
  for (const auto& file : workspace.files()) {
    for (int n = 1; n <= file.line_count(); ++n) {
      const auto& text = file.line(n);
      auto exact = collapse_whitespace(text);
      if (exact.empty()) continue;
      exact_[exact].emplace_back(file.path(), n);
      auto code = collapse_whitespace(lexical::strip_line_comment(text, file.language()));
      if (code.empty()) continue;
      if (code != exact) uncommented_[code].emplace_back(file.path(), n);
      spaceless_[without_spaces(code)].emplace_back(file.path(), n);
    }
  }
}

std::vector<std::pair<std::string, int>> LineLocator::candidates(std::string_view text) const {
  auto lookup = [](const auto& map, const std::string& key) -> const Positions* {
    if (key.empty()) return nullptr;
    auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };
  auto exact = collapse_whitespace(text);
  if (const auto* p = lookup(exact_, exact)) return *p;

  Positions out;
  auto add = [&](const Positions* p) {
    if (!p) return;
    for (const auto& pos : *p) {
      if (std::find(out.begin(), out.end(), pos) == out.end()) out.push_back(pos);
    }
  };
  // Source line carries a comment the model dropped, or the other way round.
  add(lookup(uncommented_, exact));
  for (Language lang : {Language::python, Language::java}) {
    auto code = collapse_whitespace(lexical::strip_line_comment(text, lang));
    if (code == exact) continue;
    add(lookup(exact_, code));
    add(lookup(uncommented_, code));
  }
  if (!out.empty()) return out;
  // Spacing inside the line differs.
  add(lookup(spaceless_, without_spaces(exact)));
  if (!out.empty()) return out;
  for (Language lang : {Language::python, Language::java}) {
    add(lookup(spaceless_, without_spaces(lexical::strip_line_comment(text, lang))));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<Slice, AlignmentReport> align_text_to_slice(const std::vector<RawLine>& raw,
                                                      const LineLocator& locator,
                                                      const SearchScope* scope,
                                                      const Slice* previous,
                                                      const SlicingCriterion& criterion,
                                                      const AlignOptions& options) {
  const auto& ws = locator.workspace();
  Slice slice(criterion);
  AlignmentReport report;
  std::set<std::pair<std::string, int>> taken;
  std::map<std::string, int, std::less<>> last_aligned;

  for (const auto& r : raw) {
    if (collapse_whitespace(r.text).empty()) continue;
    auto cands = locator.candidates(r.text);
    if (options.allowed && !cands.empty()) {
      std::erase_if(cands, [&](const auto& c) { return !options.allowed(c.first, c.second); });
      if (cands.empty()) {
        report.hallucinated.push_back(r);
        report.rejected.push_back(r);
        continue;
      }
    }
    if (cands.empty()) {
      report.hallucinated.push_back(r);
      continue;
    }
    if (r.file_hint) {
      if (const auto* hinted = ws.resolve_hint(*r.file_hint)) {
        std::vector<std::pair<std::string, int>> in_file;
        for (const auto& c : cands) {
          if (c.first == hinted->path()) in_file.push_back(c);
        }
        if (!in_file.empty()) cands = std::move(in_file);
      }
    }
    if (cands.size() > 1) ++report.ambiguous_resolved;
    auto rank = [&](const std::pair<std::string, int>& c) {
      int out_of_scope = scope && !scope->contains(c.first, c.second) ? 1 : 0;
      int used = taken.contains(c) ? 1 : 0;
      int fresh = previous && !previous->contains(c.first, c.second) ? 1 : 0;
      auto it = last_aligned.find(c.first);
      int distance = it == last_aligned.end() ? INT_MAX : std::abs(c.second - it->second);
      return std::make_tuple(out_of_scope, used, fresh, distance, ws.file_order(c.first), c.second);
    };
    auto best = *std::min_element(cands.begin(), cands.end(),
                                  [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
    taken.insert(best);
    last_aligned[best.first] = best.second;
    SliceLine line{best.first, best.second, ws.file(best.first).line(best.second)};
    report.aligned.push_back(line);
    slice.insert(std::move(line));
  }
  if (report.aligned.empty()) {
    fail(ErrorKind::EmptyAlignment, "no line of the model output matches the workspace");
  }
  return {std::move(slice), std::move(report)};
}

nlohmann::json slice_to_json(const Slice& slice, const std::vector<RawLine>& hallucinated,
                             const std::optional<std::string>& error) {
  nlohmann::json j;
  const auto& c = slice.criterion();
  j["criterion"] = {{"file", c.file}, {"line", c.line}, {"variables", c.variables}};
  j["lines"] = nlohmann::json::array();
  for (const auto& l : slice.lines()) {
    j["lines"].push_back({{"file", l.file}, {"line", l.line}, {"text", l.text}});
  }
  j["hallucinated"] = nlohmann::json::array();
  for (const auto& h : hallucinated) {
    nlohmann::json item = {{"text", h.text}};
    if (h.file_hint) item["file"] = *h.file_hint;
    j["hallucinated"].push_back(std::move(item));
  }
  if (error) j["error"] = *error;
  return j;
}

Slice slice_from_json(const nlohmann::json& j, const Workspace& workspace) {
  auto need = [](bool ok, const std::string& pointer, const std::string& what) {
    if (!ok) fail(ErrorKind::SchemaError, pointer + ": " + what);
  };
  need(j.is_object(), "", "slice must be an object");
  need(j.contains("criterion") && j["criterion"].is_object(), "/criterion", "missing object");
  const auto& cj = j["criterion"];
  need(cj.contains("file") && cj["file"].is_string(), "/criterion/file", "missing string");
  need(cj.contains("line") && cj["line"].is_number_integer(), "/criterion/line", "missing integer");
  std::vector<std::string> vars;
  if (cj.contains("variables")) {
    need(cj["variables"].is_array(), "/criterion/variables", "must be an array");
    for (const auto& v : cj["variables"]) {
      need(v.is_string(), "/criterion/variables", "entries must be strings");
      vars.push_back(v.get<std::string>());
    }
  }
  auto file = cj["file"].get<std::string>();
  int line = cj["line"].get<int>();
  auto text = workspace.line_text(file, line);
  need(text.has_value(), "/criterion", file + ":" + std::to_string(line) + " not in workspace");
  Slice slice(SlicingCriterion{file, line, std::move(vars), std::string(*text)});
  need(j.contains("lines") && j["lines"].is_array(), "/lines", "missing array");
  for (std::size_t i = 0; i < j["lines"].size(); ++i) {
    const auto& lj = j["lines"][i];
    auto ptr = "/lines/" + std::to_string(i);
    need(lj.is_object() && lj.contains("file") && lj["file"].is_string() && lj.contains("line") &&
             lj["line"].is_number_integer(),
         ptr, "needs file and line");
    auto lf = lj["file"].get<std::string>();
    int ln = lj["line"].get<int>();
    auto lt = workspace.line_text(lf, ln);
    need(lt.has_value(), ptr, lf + ":" + std::to_string(ln) + " not in workspace");
    slice.insert({lf, ln, std::string(*lt)});
  }
  return slice;
}

}  // namespace agentslice
