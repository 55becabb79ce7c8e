#include "support/aci_suite.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "agentslice/aci.hpp"
#include "agentslice/workspace.hpp"

namespace agentslice::testing {

namespace {

using nlohmann::json;

std::string show(const CodeRegion& r) {
  return r.file + ":" + std::to_string(r.span.start) + "-" + std::to_string(r.span.end) + " " +
         std::string(to_string(r.role));
}

std::string show(const CallSite& c) {
  return c.key() + (c.receiver_hint ? " on " + *c.receiver_hint : "") + " @" + c.file + ":" +
         std::to_string(c.line);
}

std::string show(const std::string& s) { return s; }

template <class T>
std::string show_all(const std::vector<T>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + show(items[i]);
  return out + "]";
}

RegionRole parse_role(const std::string& s) {
  for (auto r : {RegionRole::criterion_scope, RegionRole::function_body, RegionRole::global_decl,
                 RegionRole::structural}) {
    if (to_string(r) == s) return r;
  }
  throw std::runtime_error("unknown region role " + s);
}

}  // namespace

std::vector<std::filesystem::path> aci_case_dirs(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> out;
  for (const auto& lang : std::filesystem::directory_iterator(root)) {
    if (!lang.is_directory()) continue;
    for (const auto& c : std::filesystem::directory_iterator(lang.path())) {
      if (std::filesystem::exists(c.path() / "expected.json")) out.push_back(c.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

AciCaseResult run_aci_case(const std::filesystem::path& dir) {
  AciCaseResult res;
  res.name = dir.parent_path().filename().string() + "/" + dir.filename().string();
  std::ifstream in(dir / "expected.json");
  json exp = json::parse(in);

  auto ws = std::make_shared<const Workspace>(load_workspace_dir(dir / "src"));
  auto index = build_index(ws);
  auto check = [&](const std::string& what, bool ok, const std::string& got, const std::string& want) {
    ++res.checks;
    if (!ok) res.mismatches.push_back(what + ": got " + got + ", want " + want);
  };

  auto crit_file = exp["criterion"]["file"].get<std::string>();
  auto criterion = make_criterion(*ws, crit_file, exp["criterion"]["line"].get<int>());
  CodeRegion want_scope{crit_file,
                        {exp["criterion_scope"]["start"].get<int>(), exp["criterion_scope"]["end"].get<int>()},
                        RegionRole::criterion_scope};
  auto scope = criterion_scope(*index, criterion);
  check("criterion_scope", scope == want_scope, show(scope), show(want_scope));

  CodeFragment fragment;
  auto frag_file = exp["fragment"]["file"].get<std::string>();
  fragment.language = ws->file(frag_file).language();
  for (int n : exp["fragment"]["lines"]) fragment.lines.push_back({frag_file, n, ws->file(frag_file).line(n)});
  std::vector<CallSite> want_calls;
  for (const auto& c : exp["invocations"]) {
    CallSite s;
    s.callee_name = c["name"];
    s.arity = c["arity"];
    if (c.contains("receiver")) s.receiver_hint = c["receiver"].get<std::string>();
    s.file = frag_file;
    s.line = c["line"];
    want_calls.push_back(s);
  }
  auto calls = extract_invocations(*index, fragment);
  check("invocations", calls == want_calls, show_all(calls), show_all(want_calls));

  std::vector<std::string> ids;
  for (const auto& f : list_project_functions(*index)) ids.push_back(f.id());
  auto want_ids = exp["functions"].get<std::vector<std::string>>();
  check("functions", ids == want_ids, show_all(ids), show_all(want_ids));

  std::vector<SliceRef> refs;
  for (const auto& s : exp["slice"]) {
    for (int n : s["lines"]) refs.push_back({s["file"].get<std::string>(), n});
  }
  std::vector<CodeRegion> covered;
  for (const auto& c : exp["covered"]) {
    covered.push_back({c["file"], {c["start"].get<int>(), c["end"].get<int>()}, RegionRole::criterion_scope});
  }
  std::vector<CodeRegion> want_ctx;
  for (const auto& r : exp["module_context"]) {
    want_ctx.push_back({r["file"], {r["start"].get<int>(), r["end"].get<int>()}, parse_role(r["role"])});
  }
  auto ctx = module_context(*index, refs, covered);
  check("module_context", ctx == want_ctx, show_all(ctx), show_all(want_ctx));
  return res;
}

}  // namespace agentslice::testing
