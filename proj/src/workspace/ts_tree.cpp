#include "ts_tree.hpp"

extern "C" const TSLanguage* tree_sitter_java();
extern "C" const TSLanguage* tree_sitter_python();

namespace agentslice::ts {

namespace {

struct ParserDeleter {
  void operator()(TSParser* p) const { ts_parser_delete(p); }
};

}  // namespace

Tree::Tree(Language language, std::string text) : text_(std::move(text)) {
  std::unique_ptr<TSParser, ParserDeleter> parser(ts_parser_new());
  ts_parser_set_language(parser.get(),
                         language == Language::java ? tree_sitter_java() : tree_sitter_python());
  tree_.reset(ts_parser_parse_string(parser.get(), nullptr, text_.data(),
                                     static_cast<uint32_t>(text_.size())));
}

std::vector<TSNode> named_children(TSNode n) {
  std::vector<TSNode> out;
  uint32_t count = ts_node_named_child_count(n);
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) out.push_back(ts_node_named_child(n, i));
  return out;
}

std::vector<TSNode> children(TSNode n) {
  std::vector<TSNode> out;
  uint32_t count = ts_node_child_count(n);
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) out.push_back(ts_node_child(n, i));
  return out;
}

}  // namespace agentslice::ts
