#include "agentslice/scope.hpp"

#include <algorithm>

#include "agentslice/error.hpp"

namespace agentslice {

SearchScope::SearchScope(std::shared_ptr<const Workspace> workspace)
    : workspace_(std::move(workspace)) {}

bool SearchScope::add(const std::vector<CodeRegion>& regions) {
  std::size_t before = line_count();
  for (const auto& r : regions) {
    const auto* file = workspace_->find(r.file);
    if (!file) fail(ErrorKind::PreconditionViolation, "scope region in unknown file " + r.file);
    CodeRegion clamped = r;
    clamped.span.start = std::clamp(r.span.start, 1, file->line_count());
    clamped.span.end = std::clamp(r.span.end, clamped.span.start, file->line_count());
    auto it = std::find(order_.begin(), order_.end(), r.file);
    std::size_t slot = static_cast<std::size_t>(it - order_.begin());
    if (it == order_.end()) {
      order_.push_back(r.file);
      per_file_.emplace_back();
    }
    auto& list = per_file_[slot];
    list.push_back(clamped);
    list = normalize_regions(*workspace_, std::move(list));
  }
  if (line_count() == before) return false;
  ++generation_;
  return true;
}

std::vector<CodeRegion> SearchScope::regions() const {
  std::vector<CodeRegion> out;
  for (const auto& list : per_file_) out.insert(out.end(), list.begin(), list.end());
  return out;
}

bool SearchScope::contains(std::string_view file, int line) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] != file) continue;
    for (const auto& r : per_file_[i]) {
      if (r.span.contains(line)) return true;
    }
  }
  return false;
}

std::size_t SearchScope::line_count() const {
  std::size_t n = 0;
  for (const auto& list : per_file_) {
    for (const auto& r : list) n += static_cast<std::size_t>(r.span.length());
  }
  return n;
}

std::string SearchScope::render() const {
  std::string out;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const auto& file = workspace_->file(order_[i]);
    if (!out.empty()) out += '\n';
    out += "=== File: " + order_[i] + " ===\n";
    int last = 0;
    for (const auto& r : per_file_[i]) {
      if (last != 0 && r.span.start > last + 1) out += "...\n";
      for (int line = r.span.start; line <= r.span.end; ++line) {
        out += file.line(line);
        out += '\n';
      }
      last = r.span.end;
    }
  }
  return out;
}

}  // namespace agentslice
