#include "crnldp/io.hpp"
#include "crnldp/report.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace crnldp;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CRNLDP_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string net_file(const std::string& name) { return std::string(CRNLDP_NETWORKS) + "/" + name + ".crn"; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("crnldp_test_" + name)).string();
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("no-such-command").code, 1);
  EXPECT_EQ(run("simulate-ode " + net_file("ex2")).code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run("validate /nonexistent/file.crn").code, 2);
  EXPECT_EQ(run("validate builtin:nope").code, 2);
  const auto bad = temp_path("bad.crn");
  std::ofstream(bad) << "A -> B ; k = -1\n";
  EXPECT_EQ(run("validate " + bad).code, 2);
  std::ofstream(bad) << "A => B\n";
  EXPECT_EQ(run("validate " + bad).code, 2);
}

TEST(Cli, ValidateShippedNetworks) {
  for (const auto& b : builtin_networks()) {
    const auto r = run("validate " + net_file(b.name));
    EXPECT_EQ(r.code, 0) << b.name;
    EXPECT_NE(r.out.find(network_hash(builtin_network(b.name))), std::string::npos) << b.name;
  }
}

TEST(Cli, ShippedFilesMatchBuiltinsAndRoundTrip) {
  for (const auto& b : builtin_networks()) {
    const auto net = load_network(net_file(b.name));
    EXPECT_EQ(net, builtin_network(b.name)) << b.name;
    EXPECT_EQ(parse_network(serialize(net)), net) << b.name;
  }
}

TEST(Cli, AnalyzeVerdicts) {
  EXPECT_EQ(run("analyze " + net_file("ex31") + " --require-ase --samples 0").code, 3);
  const auto tetra = run("analyze " + net_file("tetra") + " --require-ase");
  ASSERT_EQ(tetra.code, 0);
  const auto j = Json::parse(tetra.out);
  EXPECT_TRUE(j["ase"].get<bool>());
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["network_hash"], network_hash(builtin_network("tetra")));
  const auto ex13 = Json::parse(run("analyze " + net_file("ex13") + " --samples 0").out);
  EXPECT_TRUE(ex13["endotactic"]["holds"].get<bool>());
  EXPECT_EQ(ex13["endotactic"]["a"]["exact"][0], "2/3");
  EXPECT_EQ(ex13["endotactic"]["a"]["exact"][1], "4/3");
  const auto unit = Json::parse(run("analyze " + net_file("ex13") + " --a 1,1 --samples 0").out);
  EXPECT_FALSE(unit["ase"].get<bool>());
  EXPECT_FALSE(unit["endotactic"]["violations"].empty());
}

TEST(Cli, AnalyzeIsByteDeterministic) {
  const auto a = run("analyze " + net_file("ex2"));
  const auto b = run("analyze builtin:ex2");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto out = temp_path("ex2.json");
  EXPECT_EQ(run("analyze " + net_file("ex2") + " --json " + out).code, 0);
  std::ifstream in(out);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file, a.out);
}

TEST(Cli, SimulateOde) {
  const auto r = run("simulate-ode builtin:ex2 --x0 1,1 --T 1 --every 0.5");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("t,A,B\n0,1,1\n", 0), 0u) << r.out;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST(Cli, SimulateSsaJsonl) {
  const auto r = run("simulate-ssa builtin:schlogl-bistable --v 50 --x0 1 --T 2 --seed 7 --trials 2 --dt 1");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto j = Json::parse(line);
    EXPECT_GE(j["n"][0].get<long long>(), 0);
    ++rows;
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(r.out, run("simulate-ssa builtin:schlogl-bistable --v 50 --x0 1 --T 2 --seed 7 --trials 2 --dt 1").out);
}

TEST(Cli, LyapunovSweep) {
  const auto r = run("lyapunov builtin:ex2 --log-radius 19000 --grid 360");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "w0,w1,sign,log_magnitude");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_NE(line.find(",-1,"), std::string::npos) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 360);
}

TEST(Cli, Action) {
  const auto path = temp_path("path.csv");
  std::ofstream(path) << "t,A,B\n0,2,0.5\n1,2,0.5\n2,2,0.5\n";
  const auto r = run("action builtin:ex2 --path " + path);
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 2 * lagrangian(builtin_network("ex2"), {2, 0.5}, {0, 0}).value, 1e-9);
  EXPECT_TRUE(j["finite"].get<bool>());
}

TEST(Cli, QuasipotentialWithOracle) {
  const auto r = run("quasipotential builtin:schlogl-bistable --from 1 --to 2 --domain 0.2:5 --restarts 0 --oracle");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>() / j["birth_death_oracle"].get<double>(), 1, 0.05);
}
