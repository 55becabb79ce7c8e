#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "agentslice/syntax_index.hpp"
#include "agentslice/workspace.hpp"

namespace agentslice::testing {

inline std::shared_ptr<const Workspace> make_workspace(std::vector<FileEntry> entries) {
  return std::make_shared<const Workspace>(load_workspace(std::move(entries)));
}

inline std::shared_ptr<const SyntaxIndex> index_of(std::vector<FileEntry> entries) {
  return build_index(make_workspace(std::move(entries)));
}

inline std::filesystem::path fixture_dir() { return AGENTSLICE_FIXTURE_DIR; }

std::string read_file(const std::filesystem::path& path);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace agentslice::testing

#include <ostream>
#include "agentslice/aci.hpp"

namespace agentslice {
inline void PrintTo(const CodeRegion& r, std::ostream* os) {
  *os << r.file << ":" << r.span.start << "-" << r.span.end << "(" << to_string(r.role) << ")";
}
}  // namespace agentslice
