#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(UDLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("udlab_cli_test_" + name);
}

TEST(Cli, KraftPrintsExactFraction) {
  const auto r = run("kraft --max-len 8");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "9/128\n");
}

TEST(Cli, SchedulePair) {
  EXPECT_EQ(run("schedule --tick 5").out, "(2,2)\n");
}

TEST(Cli, PartitionJsonEchoesConfig) {
  const auto r = run("partition --max-len 8 -k 1 --format json");
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["max_len"], 8);
  EXPECT_EQ(j["config"]["k"], 1);
  EXPECT_EQ(j["config"]["universe_id"], "default");
  EXPECT_EQ(j["classes"].size(), 2u);
}

TEST(Cli, MeasureMatchesExpectedValues) {
  const auto j = nlohmann::json::parse(run("measure -L 8 -k 1 -T 0 --format json").out);
  ASSERT_TRUE(j.contains("classes"));
  std::vector<std::string> mus;
  for (const auto& c : j["classes"]) mus.push_back(c["measure"]);
  EXPECT_NE(std::find(mus.begin(), mus.end(), "17/256"), mus.end());
}

TEST(Cli, BadFlagExitsWithOne) {
  EXPECT_EQ(run("kraft --no-such-flag").exit_code, 1);
  EXPECT_EQ(run("").exit_code, 1);
  EXPECT_EQ(run("kraft --format xml").exit_code, 1);
}

TEST(Cli, DomainErrorsExitWithTwo) {
  EXPECT_EQ(run("record --program 1111111 -k 2").exit_code, 2);
  EXPECT_EQ(run("partition -k 0").exit_code, 2);
  EXPECT_EQ(run("replay --recording /nonexistent/recording.json").exit_code, 2);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto path = temp_file("config.toml");
  {
    std::ofstream f(path);
    f << "max-len = 8\n";
  }
  EXPECT_EQ(run("kraft --config " + path.string()).out, "9/128\n");
  EXPECT_EQ(run("kraft --config " + path.string() + " --max-len 4").out, "1/16\n");
  std::filesystem::remove(path);
}

TEST(Cli, ThreadsFromEnvironmentDoNotChangeOutput) {
  const auto one = run("decompose -k 3 -T 100", "UDLAB_THREADS=1");
  const auto four = run("decompose -k 3 -T 100", "UDLAB_THREADS=4");
  EXPECT_EQ(one.exit_code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(run("kraft", "UDLAB_THREADS=zero").exit_code, 1);
}

TEST(Cli, OutFileMatchesStdout) {
  const auto path = temp_file("out.json");
  const auto direct = run("relmeasure --format json");
  ASSERT_EQ(run("relmeasure --format json --out " + path.string()).exit_code, 0);
  std::ifstream f(path);
  const std::string written((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(written, direct.out);
  std::filesystem::remove(path);
}

TEST(Cli, RecordReplayHybridSever) {
  const auto path = temp_file("recording.json");
  ASSERT_EQ(run("record --program 0100000011001111 --tape 1 -k 2 --out " + path.string()).exit_code, 0);

  const auto replay = nlohmann::json::parse(run("replay --recording " + path.string()).out);
  EXPECT_EQ(replay["machine_steps_during_playback"], 0);
  EXPECT_EQ(replay["trace"].size(), 2u);

  const auto hybrid = nlohmann::json::parse(run("hybrid --recording " + path.string() + " --actual-tape 0").out);
  EXPECT_EQ(hybrid["switch_step"], 1);
  EXPECT_EQ(hybrid["trace"][1]["output_log"], nlohmann::json::array({0}));

  const auto same = nlohmann::json::parse(run("hybrid --recording " + path.string()).out);
  EXPECT_TRUE(same["switch_step"].is_null());

  const auto sever = nlohmann::json::parse(run("sever --recording " + path.string() + " --severed all").out);
  EXPECT_EQ(sever["counterfactually_equivalent"], false);
  EXPECT_EQ(sever["trace"], replay["trace"]);

  const auto none = nlohmann::json::parse(run("sever --recording " + path.string() + " --severed ''").out);
  EXPECT_EQ(none["counterfactually_equivalent"], true);
  std::filesystem::remove(path);
}

TEST(Cli, InvarianceReportsBothEncodings) {
  const auto r = run("invariance -L 10 -k 1 -T 100 --format csv");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("relative_measure_A"), std::string::npos);
  EXPECT_NE(r.out.find("relative_measure_B"), std::string::npos);
}

}  // namespace
