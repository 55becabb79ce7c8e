#include "agentslice/aci.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "agentslice/error.hpp"
#include "agentslice/lexical.hpp"
#include "ts_tree.hpp"

namespace agentslice {

std::string_view to_string(RegionRole role) {
  switch (role) {
    case RegionRole::criterion_scope: return "criterion-scope";
    case RegionRole::function_body: return "function-body";
    case RegionRole::global_decl: return "global-decl";
    case RegionRole::structural: return "structural";
  }
  return "function-body";
}

CodeRegion criterion_scope(const SyntaxIndex& index, const SlicingCriterion& criterion) {
  const auto* file = index.workspace().find(criterion.file);
  if (!file || !file->has_line(criterion.line)) {
    fail(ErrorKind::CriterionNotFound,
         criterion.file + ":" + std::to_string(criterion.line) + " is not in the workspace");
  }
  if (const auto* fn = index.enclosing_function(criterion.file, criterion.line)) {
    return {criterion.file, fn->body_span, RegionRole::criterion_scope};
  }
  std::optional<LineSpan> best;
  auto consider = [&](const LineSpan& span) {
    if (span.contains(criterion.line) && (!best || span.length() < best->length())) best = span;
  };
  for (const auto& [path, span] : index.blocks()) {
    if (path == criterion.file) consider(span);
  }
  for (const auto& c : index.classes()) {
    if (c.file == criterion.file) consider(c.span);
  }
  if (best) return {criterion.file, *best, RegionRole::criterion_scope};
  return {criterion.file, {1, file->line_count()}, RegionRole::criterion_scope};
}

namespace {

struct RawCall {
  std::string name;
  std::optional<std::string> receiver;
  int arity = 0;
  int row = 0;  // 0-based row inside the parsed text
};

int count_arguments(TSNode args) {
  if (!ts::present(args)) return 0;
  if (ts::type(args) == "generator_expression") return 1;
  int n = 0;
  for (TSNode c : ts::named_children(args)) {
    if (ts::type(c) != "comment") ++n;
  }
  return n;
}

std::string simple_type_name(std::string_view type) {
  auto lt = type.find('<');
  if (lt != std::string_view::npos) type = type.substr(0, lt);
  auto dot = type.rfind('.');
  if (dot != std::string_view::npos) type = type.substr(dot + 1);
  while (!type.empty() && std::isspace(static_cast<unsigned char>(type.back()))) type.remove_suffix(1);
  return std::string(type);
}

void collect_calls(TSNode n, std::string_view src, Language lang, std::vector<RawCall>& out) {
  auto t = ts::type(n);
  int row = static_cast<int>(ts_node_start_point(n).row);
  if (lang == Language::python && t == "call") {
    TSNode fn = ts::field(n, "function");
    if (ts::present(fn)) {
      auto ft = ts::type(fn);
      if (ft == "identifier") {
        out.push_back({std::string(ts::text(fn, src)), std::nullopt,
                       count_arguments(ts::field(n, "arguments")), row});
      } else if (ft == "attribute") {
        TSNode attr = ts::field(fn, "attribute");
        TSNode object = ts::field(fn, "object");
        if (ts::present(attr)) {
          out.push_back({std::string(ts::text(attr, src)),
                         ts::present(object) ? std::optional<std::string>(ts::text(object, src))
                                             : std::nullopt,
                         count_arguments(ts::field(n, "arguments")), row});
        }
      }
    }
  } else if (lang == Language::java && t == "method_invocation") {
    TSNode name = ts::field(n, "name");
    TSNode object = ts::field(n, "object");
    if (ts::present(name)) {
      out.push_back({std::string(ts::text(name, src)),
                     ts::present(object) ? std::optional<std::string>(ts::text(object, src))
                                         : std::nullopt,
                     count_arguments(ts::field(n, "arguments")), row});
    }
  } else if (lang == Language::java && t == "object_creation_expression") {
    TSNode type = ts::field(n, "type");
    if (ts::present(type)) {
      out.push_back({simple_type_name(ts::text(type, src)), std::nullopt,
                     count_arguments(ts::field(n, "arguments")), row});
    }
  }
  for (TSNode c : ts::named_children(n)) collect_calls(c, src, lang, out);
}

bool has_error_node(TSNode n) {
  if (ts_node_is_error(n)) return true;
  if (!ts_node_has_error(n)) return false;
  for (TSNode c : ts::children(n)) {
    if (has_error_node(c)) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Makes one isolated line parseable on its own.
std::string single_line_fixup(std::string_view raw, Language lang) {
  std::string line = trim(raw);
  if (lang == Language::python) {
    if (line.starts_with("elif ")) line = line.substr(2);
    if (line.starts_with("@")) line.erase(0, 1);
    std::string code = lexical::strip_line_comment(line, lang);
    if (!code.empty() && code.back() == ':') line = code + " pass";
    return line;
  }
  while (!line.empty() && (line.front() == '}' || std::isspace(static_cast<unsigned char>(line.front())))) {
    line.erase(0, 1);
  }
  if (line.starts_with("else")) line = trim(std::string_view(line).substr(4));
  std::string code = lexical::strip_line_comment(line, lang);
  if (!code.empty() && code.back() == '{') line = code + "}";
  return line;
}

std::size_t indent_of(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && (s[n] == ' ' || s[n] == '\t')) ++n;
  return n;
}

}  // namespace

std::vector<CallSite> extract_invocations(const SyntaxIndex& index, const CodeFragment& fragment,
                                          const ExclusionPolicy& policy) {
  std::vector<CallSite> out;
  if (fragment.lines.empty()) return out;

  std::size_t common = std::string::npos;
  for (const auto& l : fragment.lines) {
    if (trim(l.text).empty()) continue;
    common = std::min(common, indent_of(l.text));
  }
  if (common == std::string::npos) return out;

  std::vector<std::pair<int, RawCall>> calls;  // (fragment line index, call)
  std::string joined;
  for (std::size_t i = 0; i < fragment.lines.size(); ++i) {
    if (i) joined += '\n';
    const auto& text = fragment.lines[i].text;
    joined += text.size() >= common ? text.substr(common) : trim(text);
  }
  ts::Tree whole(fragment.language, joined);
  if (!has_error_node(whole.root())) {
    std::vector<RawCall> raw;
    collect_calls(whole.root(), whole.source(), fragment.language, raw);
    for (auto& c : raw) calls.emplace_back(c.row, std::move(c));
  } else {
    for (std::size_t i = 0; i < fragment.lines.size(); ++i) {
      auto fixed = single_line_fixup(fragment.lines[i].text, fragment.language);
      if (fixed.empty()) continue;
      ts::Tree tree(fragment.language, fixed);
      std::vector<RawCall> raw;
      collect_calls(tree.root(), tree.source(), fragment.language, raw);
      for (auto& c : raw) calls.emplace_back(static_cast<int>(i), std::move(c));
    }
  }

  std::set<std::string, std::less<>> project_names;
  for (const auto& f : index.functions()) {
    if (!f.lambda) project_names.insert(f.name);
  }

  for (auto& [row, call] : calls) {
    if (row < 0 || row >= static_cast<int>(fragment.lines.size())) continue;
    if (policy.extra.contains(call.name)) continue;
    if (fragment.language == Language::python) {
      bool builtin = policy.python_builtins && !call.receiver &&
                     lexical::is_python_builtin(call.name);
      if (builtin && !(policy.python_keep_shadowed && project_names.contains(call.name))) continue;
    } else {
      if (policy.java_hard_list.contains(call.name)) continue;
      if (policy.java_drop_unknown && !project_names.contains(call.name)) continue;
    }
    const auto& at = fragment.lines[static_cast<std::size_t>(row)];
    out.push_back({std::move(call.name), std::move(call.receiver), call.arity, at.file, at.line});
  }
  return out;
}

std::vector<FunctionRecord> list_project_functions(const SyntaxIndex& index) {
  std::vector<FunctionRecord> out;
  for (const auto& f : index.functions()) {
    if (!f.lambda) out.push_back(f);
  }
  return out;
}

std::vector<CodeRegion> normalize_regions(const Workspace& workspace,
                                          std::vector<CodeRegion> regions) {
  std::sort(regions.begin(), regions.end(), [&](const CodeRegion& a, const CodeRegion& b) {
    auto fa = workspace.file_order(a.file), fb = workspace.file_order(b.file);
    if (fa != fb) return fa < fb;
    if (a.file != b.file) return a.file < b.file;
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.span.end > b.span.end;
  });
  std::vector<CodeRegion> out;
  for (auto& r : regions) {
    bool joins = !out.empty() && out.back().file == r.file &&
                 (r.span.start <= out.back().span.end ||
                  (r.span.start == out.back().span.end + 1 && r.role == out.back().role));
    if (joins) {
      auto& last = out.back();
      last.span.end = std::max(last.span.end, r.span.end);
      last.role = std::min(last.role, r.role);  // lower enum value = stronger role
      continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

// Removes the lines of `covered` from `region`, possibly splitting it.
void subtract(const CodeRegion& region, const std::vector<CodeRegion>& covered,
              std::vector<CodeRegion>& out) {
  std::vector<LineSpan> holes;
  for (const auto& c : covered) {
    if (c.file == region.file && c.span.end >= region.span.start &&
        c.span.start <= region.span.end) {
      holes.push_back(c.span);
    }
  }
  std::sort(holes.begin(), holes.end());
  int cursor = region.span.start;
  for (const auto& h : holes) {
    if (h.start > cursor) out.push_back({region.file, {cursor, h.start - 1}, region.role});
    cursor = std::max(cursor, h.end + 1);
  }
  if (cursor <= region.span.end) out.push_back({region.file, {cursor, region.span.end}, region.role});
}

}  // namespace

std::vector<CodeRegion> module_context(const SyntaxIndex& index,
                                       const std::vector<SliceRef>& slice_lines,
                                       const std::vector<CodeRegion>& covered) {
  const auto& ws = index.workspace();
  std::set<std::string, std::less<>> referenced;
  std::set<std::string, std::less<>> files;
  for (const auto& ref : slice_lines) {
    const auto* file = ws.find(ref.file);
    if (!file || !file->has_line(ref.line)) continue;
    files.insert(ref.file);
    for (const auto& tok : lexical::identifiers(file->line(ref.line), file->language())) {
      if (!lexical::is_keyword(tok.text, file->language())) referenced.insert(tok.text);
    }
  }

  std::vector<CodeRegion> regions;
  std::set<std::string, std::less<>> matched;
  for (const auto& v : index.variables()) {
    if (!referenced.contains(v.name)) continue;
    matched.insert(v.name);
    regions.push_back({v.file, v.span, RegionRole::global_decl});
  }
  std::set<std::size_t> writers;
  for (const auto& w : index.writes()) {
    if (matched.contains(w.name)) writers.insert(w.function);
  }
  for (auto fi : writers) {
    const auto& fn = index.functions()[fi];
    regions.push_back({fn.file, fn.body_span, RegionRole::function_body});
  }
  for (const auto& r : regions) files.insert(r.file);

  // Class headers are included for classes that enclose contributing lines.
  auto touches = [&](const ClassRecord& c) {
    for (const auto& ref : slice_lines) {
      if (ref.file == c.file && c.span.contains(ref.line)) return true;
    }
    for (const auto& r : regions) {
      if (r.file == c.file && c.span.contains(r.span.start)) return true;
    }
    return false;
  };
  std::vector<CodeRegion> structural;
  for (const auto& s : index.structurals()) {
    if (!files.contains(s.file)) continue;
    if (s.kind == StructuralKind::class_header) continue;
    structural.push_back({s.file, s.span, RegionRole::structural});
  }
  for (const auto& c : index.classes()) {
    if (!files.contains(c.file) || c.name.starts_with("anonymous@")) continue;
    if (touches(c)) structural.push_back({c.file, c.header, RegionRole::structural});
  }
  regions.insert(regions.end(), structural.begin(), structural.end());

  auto normalized = normalize_regions(ws, std::move(regions));
  if (covered.empty()) return normalized;
  std::vector<CodeRegion> out;
  for (const auto& r : normalized) subtract(r, covered, out);
  return out;
}

}  // namespace agentslice
