#pragma once

#include <memory>
#include <string>
#include <vector>

#include "agentslice/aci.hpp"

namespace agentslice {

/// Code regions currently shown to the model. Regions are merged per file;
/// files keep the order in which they were first added. The scope only grows.
class SearchScope {
 public:
  explicit SearchScope(std::shared_ptr<const Workspace> workspace);

  /// Adds regions; returns true (and bumps the generation) when at least one
  /// new line became visible.
  bool add(const std::vector<CodeRegion>& regions);
  bool add(const CodeRegion& region) { return add(std::vector<CodeRegion>{region}); }

  /// Merged regions, grouped by file in first-added order, then by line.
  std::vector<CodeRegion> regions() const;
  std::vector<std::string> files() const { return order_; }
  int generation() const noexcept { return generation_; }
  bool empty() const noexcept { return order_.empty(); }
  bool contains(std::string_view file, int line) const;
  std::size_t line_count() const;

  /// Each file's block starts with `=== File: <path> ===`; gaps between
  /// regions of one file are shown as `...`.
  std::string render() const;

 private:
  std::shared_ptr<const Workspace> workspace_;
  std::vector<std::string> order_;
  std::vector<std::vector<CodeRegion>> per_file_;  // parallel to order_
  int generation_ = 0;
};

}  // namespace agentslice
