#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CAVCOORD_CLI + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string tmp(const std::string& name) { return testing::TempDir() + "/" + name; }

}  // namespace

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(cli("--help"), 0);
  EXPECT_EQ(cli("--version"), 0);
  EXPECT_EQ(cli("run --help"), 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("run --bogus"), 2);
  EXPECT_EQ(cli("run --mode sideways"), 2);
  EXPECT_EQ(cli("run --preset scenario1 --seeds 5..1 --out " + tmp("x")), 2);
  EXPECT_EQ(cli("run --preset scenario1 --volumes 600,abc --out " + tmp("x")), 2);
}

TEST(Cli, InvalidConfigExitsTwo) {
  const std::string bad = tmp("bad_config.json");
  std::ofstream(bad) << R"({"approach_length_m": 150, "colour": "red"})";
  EXPECT_EQ(cli("run --scenario " + bad + " --out " + tmp("y")), 2);
  std::ofstream(bad) << R"({"u_min": 4})";
  EXPECT_EQ(cli("run --scenario " + bad + " --out " + tmp("y")), 2);
  EXPECT_EQ(cli("run --scenario " + tmp("missing.json")), 2);
}

TEST(Cli, RunWritesMetrics) {
  const std::string out = tmp("cli_run");
  fs::remove_all(out);
  EXPECT_EQ(cli("run --preset scenario2 --mode optimal --volumes 600 --seeds 1 --out " + out), 0);
  EXPECT_TRUE(fs::exists(out + "/metrics/comparison.csv"));
  EXPECT_TRUE(fs::exists(out + "/manifest.json"));
}

TEST(Cli, VerifyFrozen) { EXPECT_EQ(cli("verify --frozen-only"), 0); }
