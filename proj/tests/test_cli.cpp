#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

namespace {

using nlohmann::json;

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is folded into out when asked.
Outcome run(const std::string& args, bool with_stderr = false, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(QRR_CLI_PATH) + "' " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("qrr_cli_test_" + std::to_string(::getpid()) + "_" + name);
  std::ofstream(path) << body;
  return path;
}

TEST(Cli, ExpandGeometricSeries) {
  const Outcome r = run("expand -e \"1/(1-q)\" -n 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1, 1, 1, 1\n");
}

TEST(Cli, ExpandRogersRamanujanSumGivesPartitionCounts) {
  const Outcome r = run("expand -e \"sum n=0..inf q^(n^2) / poch(q, q, n)\" -n 6");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1, 1, 1, 1, 2, 2, 3\n");
}

TEST(Cli, ExpandErrors) {
  Outcome r = run("expand -e \"q^(n^2)\"", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("unbound variable n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("column 4"), std::string::npos);
  r = run("expand -e \"1 + * q\"", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("expected"), std::string::npos);
  EXPECT_EQ(run("expand -e \"sum n=0..inf 1\"").code, 2);
  EXPECT_EQ(run("expand").code, 2);
}

TEST(Cli, ExpandJsonAndFiles) {
  const Outcome r = run("expand -e \"poch(-q, q, inf)\" -n 5 --format json");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j["coefficients"].size(), 6u);
  EXPECT_EQ(j["coefficients"][5], json({5, "3", "1"}));
  const auto f = temp_file("expr.q", "# params: t\npoch(t, q, 2)\n");
  const Outcome g = run("expand -f '" + f.string() + "' -n 3 --sample t=-q");
  EXPECT_EQ(g.code, 0);
  EXPECT_EQ(g.out, "1, 1, 1, 1\n");
  EXPECT_EQ(run("expand -f '" + f.string() + "' -n 3").code, 2);
  std::filesystem::remove(f);
}

TEST(Cli, ListCatalog) {
  Outcome r = run("list");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("E13"), std::string::npos);
  r = run("list --format json");
  const json j = json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  int plain = 0;
  bool e13 = false;
  for (const auto& i : j) {
    if (i["params"].empty()) ++plain;
    if (i["id"] == "E13") e13 = i["citation"].get<std::string>().find("Theorem 3") != std::string::npos;
  }
  EXPECT_EQ(plain, 12);
  EXPECT_TRUE(e13);
}

TEST(Cli, VerifyAllTextAndJsonAgree) {
  const Outcome text = run("verify --all --order 60");
  EXPECT_EQ(text.code, 0) << text.out;
  EXPECT_NE(text.out.find("16/16 passed"), std::string::npos);
  const Outcome js = run("verify --all --order 60 --format json --jobs 3");
  EXPECT_EQ(js.code, 0);
  const json j = json::parse(js.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  ASSERT_EQ(j["reports"].size(), 16u);
  for (const auto& rep : j["reports"]) {
    EXPECT_TRUE(rep["pass"].get<bool>());
    EXPECT_NE(text.out.find("PASS " + rep["id"].get<std::string>() + " "), std::string::npos);
    EXPECT_TRUE(rep["first_mismatch"].is_null());
  }
}

TEST(Cli, JobsDoNotChangeOutputOrder) {
  const Outcome one = run("verify --all -n 20 --jobs 1");
  const Outcome many = run("verify --all -n 20 --jobs 8");
  EXPECT_EQ(one.out, many.out);
}

TEST(Cli, VerifySingleAndUnknown) {
  EXPECT_EQ(run("verify RR1 --order 0").code, 0);
  Outcome r = run("verify E99", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("E99"), std::string::npos);
  EXPECT_EQ(run("verify").code, 2);
  EXPECT_EQ(run("verify RR1 --format xml").code, 2);
  EXPECT_EQ(run("verify RR1 -n -3").code, 2);
  EXPECT_EQ(run("verify E5 --sample t=q^2 -n 30").code, 0);
  EXPECT_EQ(run("verify E5 --sample x=q").code, 2);
  EXPECT_EQ(run("verify E5 --sample t=1+q").code, 2);
}

TEST(Cli, MutatedIdentityFails) {
  const auto f = temp_file("bad.qid",
                           "# wrong modulus\nsum n=0..inf q^(n^2) / poch(q, q, n)\n=\n"
                           "1 / (poch(q, q^5, inf) poch(q^3, q^5, inf))\n");
  const Outcome r = run("verify -f '" + f.string() + "' --format json");
  EXPECT_EQ(r.code, 1);
  const json j = json::parse(r.out);
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_EQ(j["reports"][0]["first_mismatch"]["q_exp"], 3);
  const auto g = temp_file("good.qid", "sum n=0..inf q^(n^2) / poch(q, q, n)\n=\n1 / (poch(q, q^5, inf) poch(q^4, q^5, inf))\n");
  EXPECT_EQ(run("verify -f '" + g.string() + "'").code, 0);
  std::filesystem::remove(f);
  std::filesystem::remove(g);
}

TEST(Cli, ShippedIdentityFilesVerify) {
  const Outcome r = run("verify -f '" + std::string(QRR_DATA_DIR) + "/identities/E17.qid' -n 40");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, Proofs) {
  Outcome r = run("proof 1 -n 40");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("FAIL "), std::string::npos);
  EXPECT_EQ(run("proof 3 -n 0").code, 0);
  EXPECT_EQ(run("proof 6").code, 2);
  r = run("proof 5 -n 20 --format json");
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_GE(j["steps"].size(), 8u);
}

TEST(Cli, DefaultOrderFromEnvironment) {
  EXPECT_EQ(run("expand -e \"1/(1-q)\"", false, "QRR_DEFAULT_ORDER=2").out, "1, 1, 1\n");
  EXPECT_EQ(run("expand -e \"1/(1-q)\" -n 1", false, "QRR_DEFAULT_ORDER=2").out, "1, 1\n");
  EXPECT_EQ(run("expand -e \"1\"", false, "QRR_DEFAULT_ORDER=abc").code, 2);
  const Outcome r = run("expand -e \"1/(1-q)\"", false, "env -u QRR_DEFAULT_ORDER");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), ','), 60);
}

TEST(Cli, OutWritesJsonReport) {
  const auto path = std::filesystem::temp_directory_path() / ("qrr_cli_out_" + std::to_string(::getpid()) + ".json");
  const Outcome r = run("verify RR2 -n 10 --out '" + path.string() + "'");
  EXPECT_EQ(r.code, 0);
  std::ifstream in(path);
  const json j = json::parse(in);
  EXPECT_EQ(j["reports"][0]["id"], "RR2");
  std::filesystem::remove(path);
}

TEST(Cli, OracleCounts) {
  const Outcome r = run("oracle --modulus 5 --residues 1,4 -n 6");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1, 1, 1, 1, 2, 2, 3\n");
}

}  // namespace
