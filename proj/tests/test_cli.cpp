#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using Json = nlohmann::json;

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(LEMLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string config(const std::string& name) { return std::string(LEMLAB_CONFIG_DIR) + "/" + name; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lemlab_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_NE(run("").status, 0);
  EXPECT_NE(run("--bits 10 coeffs").status, 0);
  EXPECT_NE(run("--format xml coeffs").status, 0);
  EXPECT_NE(run("no-such-command").status, 0);
}

TEST(Cli, DomainErrorsExitTwo) {
  EXPECT_EQ(run("coeffs -d 2 -t 0.70710678118654752").status, 2);
  EXPECT_EQ(run("exact -d 0 -n 3").status, 2);
  EXPECT_EQ(run("moments -N 5 -g -3").status, 2);
}

TEST(Cli, CoeffsJson) {
  const CliResult r = run("coeffs -d 2 -t 1 -n 9");
  ASSERT_EQ(r.status, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["schema"], "lemniscate-lab/1");
  EXPECT_EQ(j["kind"], "coeffs");
  EXPECT_EQ(j["euler_characteristic"], 2);
  EXPECT_NEAR(std::stod(j["coefficients"]["C2"].get<std::string>()), 0.5, 1e-18);
  EXPECT_NEAR(std::stod(j["functionals"]["G_n"].get<std::string>()), -std::log(2.0) / 4, 1e-15);
  EXPECT_FALSE(Json::parse(run("coeffs -d 2 -t 1 -c 0.5").out).contains("functionals"));
}

TEST(Cli, CsvHeaders) {
  EXPECT_EQ(first_line(run("--format csv coeffs -d 2 -t 1").out), "name,value");
  EXPECT_EQ(first_line(run("--format csv exact -d 3 -t 0.8 -n 4 5").out), "n,log_Z,A1,A2,A3");
  EXPECT_EQ(first_line(run("--format csv moments -N 10").out), "N,a,gamma,exact,asymptotic,residual");
  EXPECT_EQ(first_line(run("--format csv converge -d 2 -t 1 -n 10 20").out), "n,exact,asymptotic,remainder");
  EXPECT_EQ(first_line(run("--format csv oscillation -d 3 -t 0.8 --range 30:35").out),
            "m,x,count,mean_residual,extrapolated,slope,predicted");
  EXPECT_EQ(first_line(run("--format csv sample --direct -n 5 -d 2 -t 0.75").out), "re,im");
}

TEST(Cli, GlobalFlagsAfterSubcommand) {
  EXPECT_EQ(run("coeffs -d 2 -t 1 --format csv").out, run("--format csv coeffs -d 2 -t 1").out);
}

TEST(Cli, ExactAgreesWithGram) {
  const CliResult r = run("exact -d 3 -t 0.4 -c 0.7 -n 10 --gram");
  ASSERT_EQ(r.status, 0);
  const Json row = Json::parse(r.out)["rows"][0];
  ASSERT_TRUE(row.contains("log_Z_gram"));
  EXPECT_NEAR(std::stod(row["log_Z"].get<std::string>()), std::stod(row["log_Z_gram"].get<std::string>()), 1e-10);
}

TEST(Cli, SampleIsSeedDeterministic) {
  const std::string args = "--format csv sample -d 2 -t 0.75 -n 20 --sweeps 50";
  const CliResult a = run("--seed 5 " + args), b = run("--seed 5 " + args), c = run("--seed 6 " + args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  std::istringstream is(a.out);
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 20);
}

TEST(Cli, SampleReportAndOut) {
  const auto out = temp_file("pts.csv"), rep = temp_file("rep.json");
  const CliResult r = run("--format csv --out " + out.string() + " sample --direct -n 2000 -d 2 -t 0.75 --report " +
                    rep.string());
  ASSERT_EQ(r.status, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream rf(rep);
  const Json j = Json::parse(rf);
  EXPECT_EQ(j["schema"], "lemniscate-lab/1");
  EXPECT_EQ(j["in_droplet_fraction"], 1.0);
  EXPECT_LT(j["sup_distance"].get<double>(), 0.05);
  std::ifstream pf(out);
  std::string header;
  std::getline(pf, header);
  EXPECT_EQ(header, "re,im");
  std::filesystem::remove(out);
  std::filesystem::remove(rep);
}

TEST(Cli, ConfigFilesAndPrecedence) {
  const CliResult j = run("--config " + config("converge_d2.json") + " converge --range 20:40:20");
  ASSERT_EQ(j.status, 0);
  const Json rep = Json::parse(j.out);
  EXPECT_EQ(rep["params"]["d"], 2);
  EXPECT_EQ(rep["rows"].size(), 2u);  // the flag replaced the configured range

  const CliResult t = run("--config " + config("converge_d3_conformal.toml") + " --bits 128 --format json converge");
  ASSERT_EQ(t.status, 0);
  const Json rt = Json::parse(t.out);
  EXPECT_EQ(rt["bits"], 128);
  EXPECT_EQ(rt["params"]["c"], 0.4);
  EXPECT_EQ(rt["rows"].size(), 4u);
}

TEST(Cli, ShippedConvergenceConfigsShrinkRemainder) {
  for (const auto& entry : std::filesystem::directory_iterator(LEMLAB_CONFIG_DIR)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("converge", 0) != 0) continue;
    const CliResult r = run("--config " + entry.path().string() + " --format json converge");
    ASSERT_EQ(r.status, 0) << name;
    const Json rows = Json::parse(r.out)["rows"];
    ASSERT_GE(rows.size(), 2u);
    EXPECT_LT(std::abs(rows.back()["remainder"].get<double>()), std::abs(rows.front()["remainder"].get<double>()))
        << name;
  }
}

TEST(Cli, VerifyIdentities) {
  const CliResult r = run("--format csv verify-identities");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(first_line(r.out), "check,error,tolerance,status");
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}
