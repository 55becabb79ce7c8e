#include <fstream>
#include <sstream>

#include "agentslice/eval.hpp"

namespace agentslice {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& id, const std::string& pointer, const std::string& what) {
  std::string where = id.empty() ? pointer : "instance '" + id + "' at " + pointer;
  fail(ErrorKind::SchemaError, where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& id, const std::string& ptr) {
  if (!obj.is_object()) schema(id, ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema(id, ptr + "/" + key, "missing");
  return *it;
}

std::string string_member(const json& obj, const char* key, const std::string& id, const std::string& ptr) {
  const auto& v = member(obj, key, id, ptr);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    schema(id, ptr + "/" + key, "expected a non-empty string");
  }
  return v.get<std::string>();
}

int line_value(const json& v, const std::string& id, const std::string& ptr) {
  if (!v.is_number_integer()) schema(id, ptr, "expected an integer line number");
  return v.get<int>();
}

void check_line(const Workspace& ws, const std::string& file, int line, const std::string& id,
                const std::string& ptr) {
  const auto* f = ws.find(file);
  if (!f->has_line(line)) {
    schema(id, ptr, "line " + std::to_string(line) + " is outside " + file + " (" +
                        std::to_string(f->line_count()) + " lines)");
  }
}

LineSet line_groups(const json& arr, const Workspace& ws, const std::string& id, const std::string& ptr) {
  if (!arr.is_array()) schema(id, ptr, "expected an array");
  LineSet out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    auto gp = ptr + "/" + std::to_string(k);
    auto file = string_member(arr[k], "file", id, gp);
    if (!ws.find(file)) schema(id, gp + "/file", "unknown file " + file);
    const auto& lines = member(arr[k], "lines", id, gp);
    if (!lines.is_array()) schema(id, gp + "/lines", "expected an array");
    for (std::size_t m = 0; m < lines.size(); ++m) {
      auto lp = gp + "/lines/" + std::to_string(m);
      int line = line_value(lines[m], id, lp);
      check_line(ws, file, line, id, lp);
      out.emplace(file, line);
    }
  }
  return out;
}

json groups_to_json(const LineSet& lines) {
  json out = json::array();
  std::string current;
  for (const auto& [file, line] : lines) {
    if (out.empty() || current != file) {
      out.push_back({{"file", file}, {"lines", json::array()}});
      current = file;
    }
    out.back()["lines"].push_back(line);
  }
  return out;
}

BenchmarkInstance parse_instance(const json& j, const std::string& ptr, std::set<std::string>& ids) {
  BenchmarkInstance inst;
  inst.id = string_member(j, "id", "", ptr);
  if (!ids.insert(inst.id).second) schema("", ptr + "/id", "duplicate instance id " + inst.id);
  const auto& id = inst.id;

  auto lang = string_member(j, "language", id, ptr);
  auto parsed = parse_language(lang);
  if (!parsed) schema(id, ptr + "/language", "unsupported language " + lang);
  inst.language = *parsed;

  const auto& files = member(j, "files", id, ptr);
  if (!files.is_array() || files.empty()) schema(id, ptr + "/files", "expected a non-empty array");
  std::vector<FileEntry> entries;
  for (std::size_t k = 0; k < files.size(); ++k) {
    auto fp = ptr + "/files/" + std::to_string(k);
    auto path = string_member(files[k], "path", id, fp);
    const auto& content = member(files[k], "content", id, fp);
    if (!content.is_string()) schema(id, fp + "/content", "expected a string");
    auto file_lang = language_from_path(path);
    entries.push_back({path, content.get<std::string>(), file_lang ? *file_lang : inst.language});
  }
  try {
    inst.workspace = std::make_shared<const Workspace>(load_workspace(std::move(entries)));
  } catch (const Error& e) {
    schema(id, ptr + "/files", e.what());
  }
  const auto& ws = *inst.workspace;

  auto cp = ptr + "/criterion";
  const auto& crit = member(j, "criterion", id, ptr);
  auto file = string_member(crit, "file", id, cp);
  if (!ws.find(file)) schema(id, cp + "/file", "unknown file " + file);
  int line = line_value(member(crit, "line", id, cp), id, cp + "/line");
  check_line(ws, file, line, id, cp + "/line");
  std::vector<std::string> vars;
  if (auto it = crit.find("variables"); it != crit.end()) {
    if (!it->is_array()) schema(id, cp + "/variables", "expected an array of names");
    for (std::size_t k = 0; k < it->size(); ++k) {
      if (!(*it)[k].is_string()) schema(id, cp + "/variables/" + std::to_string(k), "expected a string");
      vars.push_back((*it)[k].get<std::string>());
    }
  }
  inst.criterion = make_criterion(ws, file, line, vars);

  inst.ground_truth = line_groups(member(j, "ground_truth", id, ptr), ws, id, ptr + "/ground_truth");
  if (inst.ground_truth.empty()) schema(id, ptr + "/ground_truth", "ground truth is empty");

  inst.source_tag = string_member(j, "source_tag", id, ptr);
  if (inst.source_tag != "codenet" && inst.source_tag != "github") {
    schema(id, ptr + "/source_tag", "expected codenet or github");
  }
  if (auto it = j.find("buggy_lines"); it != j.end() && !it->is_null()) {
    inst.buggy_lines = line_groups(*it, ws, id, ptr + "/buggy_lines");
  }
  return inst;
}

}  // namespace

std::vector<BenchmarkInstance> parse_benchmark(const json& doc) {
  const auto& list = member(doc, "instances", "", "");
  if (!list.is_array()) schema("", "/instances", "expected an array");
  std::vector<BenchmarkInstance> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.push_back(parse_instance(list[i], "/instances/" + std::to_string(i), ids));
  }
  return out;
}

std::vector<BenchmarkInstance> load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::SchemaError, "cannot read benchmark " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, path.string() + ": invalid JSON: " + e.what());
  }
  return parse_benchmark(doc);
}

json benchmark_to_json(const std::vector<BenchmarkInstance>& instances) {
  json list = json::array();
  for (const auto& inst : instances) {
    json files = json::array();
    for (const auto& f : inst.workspace->files()) files.push_back({{"path", f.path()}, {"content", f.text()}});
    json j = {{"id", inst.id},
              {"language", std::string(to_string(inst.language))},
              {"files", files},
              {"criterion",
               {{"file", inst.criterion.file}, {"line", inst.criterion.line}, {"variables", inst.criterion.variables}}},
              {"ground_truth", groups_to_json(inst.ground_truth)},
              {"source_tag", inst.source_tag}};
    if (inst.buggy_lines) j["buggy_lines"] = groups_to_json(*inst.buggy_lines);
    list.push_back(std::move(j));
  }
  return {{"instances", list}};
}

LineSet statement_universe(const Workspace& workspace) {
  LineSet out;
  for (const auto& f : workspace.files()) {
    for (int l = 1; l <= f.line_count(); ++l) {
      if (!normalize_line(f.line(l), f.language()).empty()) out.emplace(f.path(), l);
    }
  }
  return out;
}

}  // namespace agentslice
