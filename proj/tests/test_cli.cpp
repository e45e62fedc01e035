#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(OCOLAB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream b;
  b << in.rdbuf();
  return b.str();
}

const fs::path kConfigs = OCOLAB_CONFIG_DIR;

}  // namespace

TEST(Cli, RunWritesDeterministicOutputs) {
  const fs::path tmp = fs::temp_directory_path() / "ocolab_cli_run";
  fs::remove_all(tmp);
  const std::string cfg = (kConfigs / "ball_ct.json").string();
  ASSERT_EQ(run("run --config " + cfg + " --seed 3 --out " + (tmp / "a").string() + " --threads 2", tmp.string() + ".log"), 0)
      << slurp(tmp.string() + ".log");
  EXPECT_NE(slurp(tmp.string() + ".log").find("verdict: logarithmic"), std::string::npos);
  ASSERT_EQ(run("run --config " + cfg + " --seed 3 --out " + (tmp / "b").string(), tmp.string() + ".log"), 0);
  const std::string csv = slurp(tmp / "a" / "trials.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "T,trial,seed,regret,cumulative_loss,benchmark");
  EXPECT_EQ(csv, slurp(tmp / "b" / "trials.csv"));
  fs::remove_all(tmp);
  fs::remove(tmp.string() + ".log");
}

TEST(Cli, BadConfigFailsWithDiagnostic) {
  const fs::path tmp = fs::temp_directory_path() / "ocolab_cli_bad";
  fs::create_directories(tmp);
  std::ofstream(tmp / "bad.json") << "{\"playr\": {}}";
  EXPECT_NE(run("run --config " + (tmp / "bad.json").string(), tmp / "log"), 0);
  EXPECT_NE(slurp(tmp / "log").find("did you mean 'player'"), std::string::npos) << slurp(tmp / "log");
  fs::remove_all(tmp);
}

TEST(Cli, AuxiliarySubcommands) {
  const fs::path log = fs::temp_directory_path() / "ocolab_cli_aux.log";
  const std::string pm1 = (kConfigs / "interval_pm1.json").string();
  ASSERT_EQ(run("minimax --config " + pm1 + " --horizon 2 --grid 3", log), 0);
  EXPECT_NE(slurp(log).find("\"values\": [1, 1]"), std::string::npos) << slurp(log);
  ASSERT_EQ(run("check-trivial --config " + pm1, log), 0);
  EXPECT_NE(slurp(log).find("\"trivial\": false"), std::string::npos);
  const std::string ball = (kConfigs / "ball_ct.json").string();
  ASSERT_EQ(run("holder-check --config " + ball + " --q 2 --samples 200", log), 0);
  EXPECT_NE(slurp(log).find("\"analytic_bound\": 0.5"), std::string::npos);
  ASSERT_EQ(run("estimate-modulus --config " + ball + " --eps 1 --budget 50", log), 0);
  EXPECT_NE(slurp(log).find("\"modulus\": 0.13"), std::string::npos) << slurp(log);
  ASSERT_EQ(run("construct-alpha --config " + (kConfigs / "linear_two_point.json").string() + " --p1 0.9,0.1", log), 0);
  EXPECT_NE(slurp(log).find("\"alpha\": 0.41666666"), std::string::npos) << slurp(log);
  fs::remove(log);
}
