#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "goldens/werner_goldens.hpp"
#include "qdm/io.hpp"

using qdm::io::json;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + std::string(QDM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, ComputeBell) {
  const CliRun r = cli("compute --family bell --json --no-timing");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["results"]["discord"]["discord"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(j["results"]["merge_ledger"]["markup"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(j["schema"], "1");
  EXPECT_EQ(j["timing_ms"].get<double>(), 0.0);
}

TEST(Cli, ComputeWernerMatchesGolden) {
  const CliRun r = cli("compute --family werner --p 0.5 --all --json --no-timing");
  ASSERT_EQ(r.code, 0) << r.out;
  const json d = json::parse(r.out)["results"]["discord"];
  const double golden_j = goldens::werner_classical_corr[4].second;
  EXPECT_NEAR(d["classical_corr"].get<double>(), golden_j, 1e-4);
  EXPECT_NEAR(d["discord"].get<double>(), d["mutual_info"].get<double>() - golden_j, 1e-4);
}

TEST(Cli, ComputeTextAndSubsets) {
  CliRun r = cli("compute --family werner --p 0.3 --discord --no-timing");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("discord"), std::string::npos);
  r = cli("compute --family bell --kappa --json --no-timing");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["results"]["local_purity"]["kappa"].get<double>(), 1.0, 1e-6);
  EXPECT_FALSE(j["results"].contains("merge_ledger"));
}

TEST(Cli, BadTraceExitsTwo) {
  const CliRun r = cli(std::string("compute --matrix ") + QDM_TEST_DATA + "/bad_trace.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("TraceNotOne"), std::string::npos) << r.out;
}

TEST(Cli, BadArguments) {
  EXPECT_EQ(cli("compute --family werner --p 1.5").code, 2);
  EXPECT_EQ(cli("compute --family nonsense").code, 2);
  EXPECT_EQ(cli("verify nonsense -n 3").code, 2);
  EXPECT_EQ(cli("compute --family werner --bogus").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, WernerSweep) {
  const CliRun r = cli("sweep --family werner --from 0 --to 1 --steps 11");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0][0], "param");
  EXPECT_NEAR(std::stod(rows[1][3]), 0.0, 1e-7);
  EXPECT_NEAR(std::stod(rows[11][3]), 1.0, 1e-7);
}

TEST(Cli, BellDiagonalEdgeRespectsBound) {
  const CliRun r = cli(R"(sweep --family bell-diagonal --steps 6 --params '{"from":[1,0,0,0],"to":[0,0,1,0]}')");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].back(), "ok");
    EXPECT_LE(std::stod(rows[i][3]), 1.0 + 1e-7);
  }
}

TEST(Cli, SweepAndVerifyAreByteIdentical) {
  for (const char* args : {"sweep --family werner --values 0.1,0.5,0.9 --seed 3", "verify all -n 5 --seed 11"}) {
    const CliRun a = cli(args);
    const CliRun b = cli(args);
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, SeedFromEnvironment) {
  const CliRun a = cli("verify ssa -n 3 --seed 77");
  const CliRun b = cli("verify ssa -n 3");
  EXPECT_EQ(cli("verify ssa -n 3", "DISCORD_MERGE_SEED=77 ").out, a.out);
  EXPECT_NE(b.out, a.out);
}

TEST(Cli, VerifySuites) {
  CliRun r = cli("verify ssa -n 1000 --seed 1");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("passed 1000/1000"), std::string::npos) << r.out;
  r = cli("verify purestate -n 200");
  EXPECT_EQ(r.code, 0) << r.out;
  r = cli("verify markup -n 300");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("passed 300/300"), std::string::npos) << r.out;
}
