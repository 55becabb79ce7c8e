#pragma once

// Thin RAII layer over the tree-sitter C API. Nothing outside src/workspace
// sees these handles.

#include <tree_sitter/api.h>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "agentslice/workspace.hpp"

namespace agentslice::ts {

class Tree {
 public:
  Tree(Language language, std::string text);

  TSNode root() const { return ts_tree_root_node(tree_.get()); }
  bool has_error() const { return ts_node_has_error(root()); }
  std::string_view source() const noexcept { return text_; }

 private:
  struct Deleter {
    void operator()(TSTree* t) const { ts_tree_delete(t); }
  };
  std::string text_;
  std::unique_ptr<TSTree, Deleter> tree_;
};

inline std::string_view type(TSNode n) { return ts_node_type(n); }

inline std::string_view text(TSNode n, std::string_view src) {
  auto b = ts_node_start_byte(n);
  auto e = ts_node_end_byte(n);
  if (b > src.size() || e > src.size() || e < b) return {};
  return src.substr(b, e - b);
}

inline TSNode field(TSNode n, std::string_view name) {
  return ts_node_child_by_field_name(n, name.data(), static_cast<uint32_t>(name.size()));
}

inline bool present(TSNode n) { return !ts_node_is_null(n); }

/// 1-based first line of a node.
inline int first_line(TSNode n) { return static_cast<int>(ts_node_start_point(n).row) + 1; }

/// 1-based last line; a node ending at column 0 ends on the previous line.
inline int last_line(TSNode n) {
  auto s = ts_node_start_point(n);
  auto e = ts_node_end_point(n);
  if (e.column == 0 && e.row > s.row) return static_cast<int>(e.row);
  return static_cast<int>(e.row) + 1;
}

std::vector<TSNode> named_children(TSNode n);
std::vector<TSNode> children(TSNode n);

}  // namespace agentslice::ts
