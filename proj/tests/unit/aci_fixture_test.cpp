#include <chrono>

#include <gtest/gtest.h>

#include "support/aci_suite.hpp"
#include "support/helpers.hpp"

namespace agentslice::testing {
namespace {

class AciFixture : public ::testing::TestWithParam<std::filesystem::path> {};

TEST_P(AciFixture, MatchesAnnotation) {
  auto res = run_aci_case(GetParam());
  EXPECT_EQ(res.checks, 4);
  for (const auto& m : res.mismatches) ADD_FAILURE() << res.name << " " << m;
}

INSTANTIATE_TEST_SUITE_P(Annotated, AciFixture,
                         ::testing::ValuesIn(aci_case_dirs(fixture_dir() / "aci")),
                         [](const auto& info) {
                           return info.param.parent_path().filename().string() + "_" +
                                  info.param.filename().string();
                         });

TEST(AciSuite, AtLeastTwentyPerLanguageUnderFiveSeconds) {
  auto dirs = aci_case_dirs(fixture_dir() / "aci");
  int java = 0, python = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (const auto& d : dirs) {
    (d.parent_path().filename() == "java" ? java : python)++;
    run_aci_case(d);
  }
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(java, 20);
  EXPECT_GE(python, 20);
  EXPECT_LT(secs, 5.0);
}

}  // namespace
}  // namespace agentslice::testing
