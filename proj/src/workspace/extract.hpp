#pragma once

#include <string>
#include <vector>

#include "agentslice/syntax_index.hpp"
#include "ts_tree.hpp"

namespace agentslice::detail {

struct LocalWrite {
  std::size_t function = 0;  // index into FileRecords::functions
  std::string name;
  int line = 0;
};

struct FileRecords {
  std::vector<FunctionRecord> functions;
  std::vector<ClassRecord> classes;
  std::vector<VariableDecl> variables;
  std::vector<StructuralDecl> structurals;
  std::vector<LocalWrite> writes;
  std::vector<LineSpan> blocks;
};

FileRecords extract_python(const SourceFile& file, const ts::Tree& tree);
FileRecords extract_java(const SourceFile& file, const ts::Tree& tree);

std::string join_chain(const std::vector<std::string>& chain, const std::string& leaf);
bool is_class_like_name(std::string_view word);

}  // namespace agentslice::detail
