#include <fstream>
#include <sstream>

#include "agentslice/error.hpp"
#include "agentslice/protocol.hpp"

namespace agentslice {

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::synthesis: return "synthesis";
    case PromptKind::expansion: return "expansion";
    case PromptKind::conciseness: return "conciseness";
    case PromptKind::completeness: return "completeness";
    case PromptKind::refinement: return "refinement";
    case PromptKind::format_reminder: return "format_reminder";
  }
  return "synthesis";
}

namespace {

void check_placeholders(std::string_view text, std::string_view name) {
  for (auto open = text.find("{{"); open != std::string_view::npos; open = text.find("{{", open)) {
    auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      fail(ErrorKind::InvalidTemplate, std::string(name) + ": unclosed placeholder");
    }
    auto key = text.substr(open + 2, close - open - 2);
    bool known = false;
    for (auto p : kPlaceholders) known = known || p == key;
    if (!known) {
      fail(ErrorKind::InvalidTemplate,
           std::string(name) + ": unknown placeholder {{" + std::string(key) + "}}");
    }
    open = close + 2;
  }
}

std::string trim_blank_lines(const std::string& s) {
  auto b = s.find_first_not_of('\n');
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

PromptTemplate parse_template(std::string_view text, std::string_view name) {
  PromptTemplate t;
  std::string* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("@")) {
      auto section = std::string_view(line).substr(1);
      while (!section.empty() && (section.back() == ' ' || section.back() == '\t')) section.remove_suffix(1);
      if (section == "role") current = &t.role;
      else if (section == "definitions") current = &t.definitions;
      else if (section == "rules") current = &t.rules;
      else if (section == "task") current = &t.task;
      else if (section == "output_format") current = &t.output_format;
      else fail(ErrorKind::InvalidTemplate, std::string(name) + ": unknown section @" + std::string(section));
      continue;
    }
    if (!current) {
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      fail(ErrorKind::InvalidTemplate, std::string(name) + ": text before the first section");
    }
    *current += line;
    *current += '\n';
  }
  for (auto* s : {&t.role, &t.definitions, &t.rules, &t.task, &t.output_format}) {
    *s = trim_blank_lines(*s);
    check_placeholders(*s, name);
  }
  if (t.role.empty() && t.task.empty()) {
    fail(ErrorKind::InvalidTemplate, std::string(name) + ": needs a @role or @task section");
  }
  return t;
}

PromptLibrary PromptLibrary::defaults() {
  PromptLibrary lib;
  for (auto kind : kAllPrompts) {
    lib.templates_[kind] = parse_template(default_template_text(kind), to_string(kind));
  }
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    fail(ErrorKind::InvalidTemplate, "template directory not found: " + dir.string());
  }
  PromptLibrary lib = defaults();
  for (auto kind : kAllPrompts) {
    auto path = dir / (std::string(to_string(kind)) + ".tmpl");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    lib.templates_[kind] = parse_template(ss.str(), path.string());
  }
  return lib;
}

}  // namespace agentslice
