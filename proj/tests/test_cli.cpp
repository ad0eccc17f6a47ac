#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SCISUMM_CLI) + " " + args + " 2>&1";
  Run r{-1, {}};
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("scisumm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  fs::path dir;
  const std::string sample = std::string(SCISUMM_SAMPLE_DIR);
};

}  // namespace

TEST_F(Cli, Version) {
  const auto r = run("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("scisumm"), std::string::npos);
}

TEST_F(Cli, LeadWritesOutputAndRunConfig) {
  const auto r = run("summarize --system lead --k 1 --in " + sample + "/pairs.jsonl --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  ASSERT_TRUE(fs::exists(path("o")));
  std::ifstream in(path("o"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["selected_indices"], nlohmann::json::array({0}));
    ++lines;
  }
  EXPECT_EQ(lines, 100u);
  const auto cfg = nlohmann::json::parse(slurp(path("o.run.json")));
  EXPECT_EQ(cfg["subcommand"], "summarize");
  EXPECT_EQ(cfg["options"]["damping"], "0.85");  // defaults are recorded too
  EXPECT_NE(r.output.find("run config"), std::string::npos);
}

TEST_F(Cli, BogusSystem) {
  const auto r = run("summarize --system bogus --in x --out y");
  EXPECT_EQ(r.code, 1);
  for (auto s : {"lead", "tfidf-emb", "rwmd-rank", "lexrank", "oracle"}) EXPECT_NE(r.output.find(s), std::string::npos);
}

TEST_F(Cli, UnknownFlagListsFlags) {
  const auto r = run("stats --in x --frobnicate");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("--json"), std::string::npos);
}

TEST_F(Cli, MissingEmbeddingsIsUsageError) {
  const auto r = run("summarize --system rwmd-rank --in " + sample + "/pairs.jsonl --out " + path("o"));
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, MissingInputIsDataError) {
  EXPECT_EQ(run("stats --in /nonexistent/pairs.jsonl").code, 2);
}

TEST_F(Cli, EvaluateMismatchedIds) {
  std::ofstream(path("sys.jsonl")) << R"({"id":"zz1","summary_text":"a ."})" << "\n";
  const auto r = run("evaluate --system-out " + path("sys.jsonl") + " --refs " + sample + "/pairs.jsonl --sources " +
                     sample + "/pairs.jsonl --report " + path("rep.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("zz1"), std::string::npos);
  EXPECT_NE(r.output.find("total"), std::string::npos);
}

TEST_F(Cli, EvaluateSelfIsPerfect) {
  {
    std::ifstream in(sample + "/pairs.jsonl");
    std::ofstream out(path("self.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      out << nlohmann::json{{"id", j["id"]}, {"text", j["target"]}}.dump() << "\n";
    }
  }
  const auto r = run("evaluate --system-out " + path("self.jsonl") + " --refs " + sample + "/pairs.jsonl --sources " +
                     sample + "/pairs.jsonl --report " + path("rep.json") + " --per-pair " + path("pp.jsonl"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto rep = nlohmann::json::parse(slurp(path("rep.json")));
  EXPECT_EQ(rep["columns"]["r1_f1"]["mean"], 1.0);
  EXPECT_EQ(rep["columns"]["rl_recall"]["std"], 0.0);
  std::ifstream pp(path("pp.jsonl"));
  std::string line;
  std::getline(pp, line);
  const auto first = nlohmann::json::parse(line);
  for (auto k : {"id", "r1", "r2", "rl", "overlap", "repeat", "tokens"}) EXPECT_TRUE(first.contains(k)) << k;
}

TEST_F(Cli, PipelineAndWorkerInvariance) {
  ASSERT_EQ(run("preprocess --task title-gen --in " + sample + "/articles.jsonl --out " + path("tg.jsonl") +
                " --keep-rejects " + path("rej.jsonl"))
                .code,
            0);
  ASSERT_EQ(run("build-idf --in " + path("tg.jsonl") + " --out " + path("idf.tsv")).code, 0);
  for (auto w : {"1", "3"}) {
    ASSERT_EQ(run(std::string("summarize --system lexrank --idf ") + path("idf.tsv") + " --in " + path("tg.jsonl") +
                  " --out " + path(std::string("lx") + w) + " --workers " + w)
                  .code,
              0);
    ASSERT_EQ(run(std::string("stats --in ") + path("tg.jsonl") + " --json " + path(std::string("st") + w) +
                  " --workers " + w)
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("lx1")), slurp(path("lx3")));
  EXPECT_EQ(slurp(path("st1")), slurp(path("st3")));

  ASSERT_EQ(run("histogram --selections " + path("lx1") + " --normalized --bins 5 --out " + path("h.csv")).code, 0);
  EXPECT_EQ(slurp(path("h.csv")).substr(0, 22), "bin_start,bin_end,mass");

  ASSERT_EQ(run("split --in " + path("tg.jsonl") + " --out-prefix " + path("sp") + " --seed 5").code, 0);
  std::size_t total = 0;
  for (auto part : {"train", "valid", "test"}) {
    std::ifstream in(path(std::string("sp.") + part + ".jsonl"));
    std::string l;
    while (std::getline(in, l)) ++total;
  }
  EXPECT_EQ(total, 100u);
}

TEST_F(Cli, StopwordEnvironmentOverride) {
  std::ofstream(path("sw.txt")) << "cells\n";
  const auto r = run("stats --in " + sample + "/pairs.jsonl --json " + path("a.json"));
  ASSERT_EQ(r.code, 0);
  const auto env = "SCISUMM_STOPWORDS=" + path("sw.txt") + " ";
  const std::string cmd = env + SCISUMM_CLI + " stats --in " + sample + "/pairs.jsonl --json " + path("b.json") + " 2>/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NE(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(nlohmann::json::parse(slurp(path("b.json.run.json")))["stopwords"], path("sw.txt"));
}
