#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string command = std::string(RMIRL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() / ("rmirl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
};

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("demo --help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("demo"), 2);
  EXPECT_EQ(run("demo --env office --out " + dir.string()), 2);
  EXPECT_EQ(run("demo --env coffee --bogus 1"), 2);
  EXPECT_EQ(run("demo --env coffee --runs zero --out " + dir.string()), 2);
  EXPECT_EQ(run("infer --env coffee --out " + (dir / "nothing").string()), 2);
  EXPECT_EQ(run("demo --config " + (dir / "missing.cfg").string()), 2);
}

TEST_F(Cli, RuntimeFailuresExitOne) {
  const fs::path foreign = dir / "foreign.json";
  std::ofstream(foreign) << R"({"n":1,"alphabet":["eps","g"],"rewards":[0,1],"t":[[1,1]],"r":[[0,1]]})";
  EXPECT_EQ(run("eval --env coffee --eval-episodes 2 --rm " + foreign.string() + " --out " + dir.string()), 1);
  const fs::path garbage = dir / "garbage.json";
  std::ofstream(garbage) << "{\"n\": ";
  EXPECT_EQ(run("export-dot --env coffee --rm " + garbage.string()), 1);
}

TEST_F(Cli, DemoWritesTriples) {
  ASSERT_EQ(run("demo --env recharge --runs 400 --out " + dir.string()), 0);
  const std::string text = slurp(dir / "demo.txt");
  std::size_t steps = 0;
  std::size_t episodes = 0;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("s=", 0) == 0) ++steps;
    if (line.rfind("episode ", 0) == 0) ++episodes;
  }
  EXPECT_EQ(episodes, 400u);
  EXPECT_EQ(steps, 10000u);
}

TEST_F(Cli, ConfigFileAndFlags) {
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "env=coffee\nruns=3\nep-len=4\n";
  ASSERT_EQ(run("demo --config " + cfg.string() + " --ep-len 5 --out " + dir.string()), 0);
  std::size_t steps = 0;
  std::istringstream lines(slurp(dir / "demo.txt"));
  for (std::string line; std::getline(lines, line);) steps += line.rfind("s=", 0) == 0;
  EXPECT_EQ(steps, 15u);
}

TEST_F(Cli, PipelineIsDeterministic) {
  const std::string common = " --env coffee --runs 10 --ep-len 30 --iterations 20 --eval-episodes 5 --seed 11";
  const fs::path a = dir / "a";
  const fs::path b = dir / "b";
  ASSERT_EQ(run("pipeline" + common + " --out " + a.string()), 0);
  ASSERT_EQ(run("pipeline" + common + " --out " + b.string()), 0);
  for (const char* file : {"demo.txt", "rm.json", "report.txt", "rm.dot", "trace_chain1.csv", "trace_chain2.csv",
                           "trace_chain3.csv"}) {
    ASSERT_TRUE(fs::exists(a / file)) << file;
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
  }
  const std::string summary = slurp(a / "summary.txt");
  EXPECT_NE(summary.find("r_a="), std::string::npos);
  EXPECT_NE(summary.find("# effective config"), std::string::npos);
  EXPECT_NE(summary.find("iterations=20"), std::string::npos);
}

TEST_F(Cli, StagesChain) {
  const std::string common = " --env coffee --runs 5 --ep-len 20 --iterations 10 --eval-episodes 3 --out " + dir.string();
  ASSERT_EQ(run("demo" + common), 0);
  ASSERT_EQ(run("infer" + common), 0);
  ASSERT_EQ(run("eval" + common), 0);
  EXPECT_NE(slurp(dir / "report.txt").find("r_e="), std::string::npos);
  const std::string command = std::string(RMIRL_CLI_PATH) + " export-dot" + common + " > " + (dir / "out.dot").string();
  ASSERT_EQ(std::system(command.c_str()), 0);
  EXPECT_EQ(slurp(dir / "out.dot").rfind("digraph", 0), 0u);
}

}  // namespace
