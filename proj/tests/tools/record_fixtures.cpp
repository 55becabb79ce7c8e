// Regenerates the bundled cassettes from the scripted oracles.
// Usage: record_fixtures [out_dir]   (default: the fixtures directory)

#include <iostream>

#include "support/fixture_cases.hpp"
#include "support/helpers.hpp"

int main(int argc, char** argv) {
  auto root = agentslice::testing::fixture_dir();
  std::filesystem::path out = argc > 1 ? argv[1] : root;
  try {
    agentslice::testing::write_fixture_cassettes(root, out);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  std::cout << "cassettes written under " << out << "\n";
  return 0;
}
