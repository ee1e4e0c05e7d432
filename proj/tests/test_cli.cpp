#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded.
Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + HEISVOA_CLI + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string("\"") + HEISVOA_TEST_DATA + "/" + name + "\""; }

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

TEST(Cli, ProductExamples) {
  auto r = run("product \"u1(-1)\" 1 \"u1(-1)\" --p 5 --level 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(trim(r.out), "1");
  r = run("product \"1\" -1 \"u1(-1)\" --p 5");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(trim(r.out), "u1(-1)");
  r = run("product \"u1(-1)\" 5 \"u1(-2)^2\" --p 5");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(trim(r.out), "0");
}

TEST(Cli, ProductJson) {
  const auto r = run("product \"u1(-1)\" 1 \"u1(-1)\" --p 5 --level 2 --json");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["result"], "2");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("product \"u1(-1\" 1 \"u1(-1)\" --p 5").code, 2);
  EXPECT_EQ(run("verify conformal --p 2").code, 2);
  EXPECT_EQ(run("verify nonsense --p 5").code, 2);
  EXPECT_EQ(run("verify axioms --p 4").code, 2);
  EXPECT_EQ(run("verify axioms --p 5 --lambda /nonexistent/file.json").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, VerifyAxiomsPasses) {
  const auto r = run("verify axioms --p 5 --dim 1 --level 1 --max-weight 3 --seed 7");
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "pass");
  EXPECT_FALSE(j.contains("seconds"));
}

TEST(Cli, UnstableLambdaReportsWitness) {
  const auto r = run("verify ideal --p 3 --lambda " + data("bad_lambda_p3.json"));
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& c : j["checks"]) {
    if (c["id"] != "ideal.D_stability") continue;
    found = true;
    EXPECT_EQ(c["note"], "not D-stable");
    EXPECT_TRUE(c["details"].contains("generator"));
    EXPECT_TRUE(c["details"].contains("image_normal_form"));
  }
  EXPECT_TRUE(found);
}

TEST(Cli, DecomposeFiles) {
  auto r = run("decompose " + data("irreducible_p3.json") + " --json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["summands"].size(), 1u);

  r = run("decompose " + data("double_p3.json") + " --json");
  ASSERT_EQ(r.code, 0);
  j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["summands"].size(), 2u);
  for (const auto& s : j["summands"]) EXPECT_EQ(s["dimension"], 3);
  EXPECT_EQ(j["residual"], 0);

  r = run("decompose " + data("broken_level_p3.json"));
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, VerifyAllIsDeterministic) {
  const std::string args = "verify all --p 3 --dim 1 --max-weight 3 --seed 11 --lambda " + data("lambda_p3.json");
  const auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}
