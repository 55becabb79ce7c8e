#include <algorithm>
#include <cctype>
#include <sstream>

#include "agentslice/error.hpp"
#include "agentslice/protocol.hpp"

namespace agentslice {

namespace {

using nlohmann::json;

struct Fence {
  std::string info;
  std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view text) {
  std::vector<Fence> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<Fence> open;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    bool fence = first != std::string::npos && line.compare(first, 3, "```") == 0;
    if (fence) {
      if (open) {
        out.push_back(std::move(*open));
        open.reset();
      } else {
        auto info = line.substr(first + 3);
        auto b = info.find_first_not_of(" \t");
        auto e = info.find_last_not_of(" \t");
        open = Fence{b == std::string::npos ? "" : info.substr(b, e - b + 1), ""};
      }
      continue;
    }
    if (open) open->body += line + "\n";
  }
  return out;
}

std::optional<json> parse_object(std::string_view text) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

bool looks_like_filename(std::string_view info) {
  if (info.empty() || info.find_first_of(" \t") != std::string_view::npos) return false;
  return info.find('.') != std::string_view::npos || info.find('/') != std::string_view::npos;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) nl = s.size();
    std::string line(s.substr(start, nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    start = nl + 1;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::string spaceless(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

std::optional<json> extract_json_object(std::string_view text) {
  if (auto j = parse_object(text)) return j;
  for (const auto& f : fenced_blocks(text)) {
    if (auto j = parse_object(f.body)) return j;
  }
  auto open = text.find('{');
  auto close = text.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    if (auto j = parse_object(text.substr(open, close - open + 1))) return j;
  }
  return std::nullopt;
}

std::vector<RawLine> parse_slice_response(std::string_view text) {
  std::vector<RawLine> out;
  if (auto j = extract_json_object(text); j && j->contains("slices") && (*j)["slices"].is_array()) {
    for (const auto& entry : (*j)["slices"]) {
      if (!entry.is_object()) continue;
      std::optional<std::string> file;
      if (entry.contains("file") && entry["file"].is_string()) file = entry["file"].get<std::string>();
      if (!entry.contains("lines")) continue;
      const auto& lines = entry["lines"];
      auto take = [&](const std::string& s) {
        for (auto& l : split_lines(s)) out.push_back({file, std::move(l)});
      };
      if (lines.is_string()) {
        take(lines.get<std::string>());
      } else if (lines.is_array()) {
        for (const auto& l : lines) {
          if (l.is_string()) take(l.get<std::string>());
        }
      }
    }
    if (!out.empty()) return out;
  }
  for (const auto& f : fenced_blocks(text)) {
    if (!looks_like_filename(f.info)) continue;
    for (auto& l : split_lines(f.body)) out.push_back({f.info, std::move(l)});
  }
  bool any = std::any_of(out.begin(), out.end(), [](const RawLine& r) {
    return r.text.find_first_not_of(" \t") != std::string::npos;
  });
  if (!any) fail(ErrorKind::ParseError, "reply holds neither a slice object nor filename code blocks");
  return out;
}

ExpansionAnswer parse_expansion_response(std::string_view text, const std::vector<CallSite>& calls,
                                         const std::vector<FunctionRecord>& catalog) {
  auto j = extract_json_object(text);
  if (!j || !j->contains("resolutions") || !(*j)["resolutions"].is_array()) {
    fail(ErrorKind::ParseError, "reply holds no resolutions array");
  }
  ExpansionAnswer answer;
  std::vector<std::string> done;
  for (const auto& entry : (*j)["resolutions"]) {
    if (!entry.is_object() || !entry.contains("call") || !entry["call"].is_string()) continue;
    if (!entry.contains("target") || !entry["target"].is_string()) continue;  // explicit "no match"
    auto key = spaceless(entry["call"].get<std::string>());
    auto target = spaceless(entry["target"].get<std::string>());
    if (target.empty()) continue;
    if (auto sep = target.rfind("::"); sep != std::string::npos) target = target.substr(sep + 2);
    std::optional<std::string> file;
    if (entry.contains("file") && entry["file"].is_string()) file = entry["file"].get<std::string>();

    auto call = std::find_if(calls.begin(), calls.end(), [&](const CallSite& c) { return c.key() == key; });
    if (call == calls.end()) {
      ++answer.hallucinated;
      answer.notes.push_back("unknown call " + key);
      continue;
    }
    if (std::find(done.begin(), done.end(), key) != done.end()) {
      ++answer.duplicates;
      answer.notes.push_back("ignored extra target " + target + " for " + key);
      continue;
    }
    std::vector<const FunctionRecord*> matches;
    bool bare = target.find('(') == std::string::npos;
    for (const auto& f : catalog) {
      if (bare ? spaceless(f.qualified_name) == target : spaceless(f.signature()) == target) {
        matches.push_back(&f);
      }
    }
    if (bare && matches.size() > 1) matches.clear();  // ambiguous without parameter types
    if (matches.size() > 1 && file) {
      auto it = std::find_if(matches.begin(), matches.end(), [&](const FunctionRecord* f) {
        return f->file == *file || f->file.ends_with("/" + *file);
      });
      if (it != matches.end()) matches = {*it};
    }
    if (matches.empty()) {
      ++answer.hallucinated;
      answer.notes.push_back("target not in catalog: " + target);
      continue;
    }
    done.push_back(key);
    answer.resolved.emplace_back(*call, *matches.front());
  }
  return answer;
}

CompletenessAnswer parse_completeness_response(std::string_view text) {
  auto j = extract_json_object(text);
  if (!j || !j->contains("missing") || !(*j)["missing"].is_array()) {
    fail(ErrorKind::ParseError, "reply holds no missing array");
  }
  CompletenessAnswer answer;
  for (const auto& item : (*j)["missing"]) {
    MissingItem m;
    if (item.is_string()) {
      m.description = item.get<std::string>();
    } else if (item.is_object()) {
      if (item.contains("description") && item["description"].is_string()) {
        m.description = item["description"].get<std::string>();
      }
      if (item.contains("kind") && item["kind"].is_string() &&
          item["kind"].get<std::string>() == "structural") {
        m.kind = MissingKind::structural;
      }
    } else {
      continue;
    }
    if (m.description.find_first_not_of(" \t\n") == std::string::npos) continue;
    answer.missing.push_back(std::move(m));
  }
  answer.verdict = answer.missing.empty() ? Verdict::complete : Verdict::incomplete;
  return answer;
}

std::string write_slice_answer(const std::vector<RawLine>& lines) {
  json slices = json::array();
  for (const auto& l : lines) {
    bool same = !slices.empty() && ((l.file_hint && slices.back()["file"] == *l.file_hint) ||
                                    (!l.file_hint && !slices.back().contains("file")));
    if (!same) {
      json entry = {{"lines", json::array()}};
      if (l.file_hint) entry["file"] = *l.file_hint;
      slices.push_back(std::move(entry));
    }
    slices.back()["lines"].push_back(l.text);
  }
  return dump(json{{"slices", slices}});
}

std::string write_expansion_answer(const std::vector<std::pair<std::string, std::string>>& call_to_target) {
  json list = json::array();
  for (const auto& [call, target] : call_to_target) list.push_back({{"call", call}, {"target", target}});
  return dump(json{{"resolutions", list}});
}

std::string write_completeness_answer(const std::vector<MissingItem>& missing) {
  json list = json::array();
  for (const auto& m : missing) {
    list.push_back({{"kind", std::string(to_string(m.kind))}, {"description", m.description}});
  }
  return dump(json{{"missing", list}});
}

}  // namespace agentslice
