#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "lexdom_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string p(const std::string& name) { return (workdir() / name).string(); }

int run(const std::string& args) {
  const std::string cmd = std::string(LEXDOM_CLI) + " " + args;
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

// Synthetic data shared by the cases below.
const std::string& data_csv() {
  static const std::string path = [] {
    const auto out = p("data.csv");
    REQUIRE(run("synthesize --seed 3 --count 1200 --out " + out) == 0);
    return out;
  }();
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("segment") {
  write(p("hosts.txt"), "www.more.example.com\nduckduckgo.com\nhttp://Cheap-Flights.co.uk/x\n");
  REQUIRE(run("segment < " + p("hosts.txt") + " > " + p("seg.txt")) == 0);
  CHECK(slurp(p("seg.txt")) ==
        "www.more.example.com\texample\nduckduckgo.com\tduck duck go\nhttp://Cheap-Flights.co.uk/x\tcheap flights\n");
}

TEST_CASE("segment reports unusable hosts and keeps going") {
  write(p("bad.txt"), "co.uk\nexample.com\n");
  CHECK(run("segment < " + p("bad.txt") + " > " + p("seg_bad.txt") + " 2>/dev/null") != 0);
  CHECK(slurp(p("seg_bad.txt")) == "example.com\texample\n");
}

TEST_CASE("featurize writes vectors and a feature-space sidecar") {
  REQUIRE(run("featurize --data " + data_csv() + " --feature-sets basic,tld --space-out " + p("space.json") +
              " > " + p("vectors.txt")) == 0);
  const auto space = nlohmann::json::parse(slurp(p("space.json")));
  CHECK(space.at("enabled") == "basic,tld");
  std::istringstream lines(slurp(p("vectors.txt")));
  std::string line;
  std::getline(lines, line);
  const auto tab = line.find('\t');
  REQUIRE(tab != std::string::npos);
  CHECK(line.find(":1", tab) != std::string::npos);

  write(p("one.txt"), "payday-loans.com\n");
  REQUIRE(run("featurize --space " + p("space.json") + " < " + p("one.txt") + " > " + p("one_vec.txt")) == 0);
  CHECK(slurp(p("one_vec.txt")).rfind("payday-loans.com\t", 0) == 0);
}

TEST_CASE("train, predict, evaluate, coefficients") {
  REQUIRE(run("train --data " + data_csv() + " --seed 1 --folds 3 --lambda-count 20 --model-out " + p("m7.json") +
              " > " + p("train.txt")) == 0);
  write(p("score.txt"), "casino-jackpot.com\nlibrary.org\n");
  REQUIRE(run("predict --model " + p("m7.json") + " < " + p("score.txt") + " > " + p("pred.txt")) == 0);
  std::istringstream pred(slurp(p("pred.txt")));
  std::string host;
  double prob_bad = 0, prob_good = 0;
  pred >> host >> prob_bad >> host >> prob_good;
  CHECK(prob_bad > prob_good);

  REQUIRE(run("evaluate --model " + p("m7.json") + " --data " + data_csv() + " --roc-out " + p("roc.tsv") +
              " --json-out " + p("eval.json") + " > " + p("eval.txt")) == 0);
  const auto ev = nlohmann::json::parse(slurp(p("eval.json")));
  CHECK(ev.at("auc").get<double>() > 0.6);
  CHECK(slurp(p("roc.tsv")).rfind("0\t0\n", 0) == 0);

  REQUIRE(run("coefficients --model " + p("m7.json") + " --top 10 > " + p("coef.txt")) == 0);
  CHECK(slurp(p("coef.txt")).find("# malicious") != std::string::npos);
}

TEST_CASE("experiment reports are byte-identical for a fixed seed") {
  const std::string args = "experiment --data " + data_csv() +
                           " --seed 21 --folds 3 --lambda-count 15 --models M1,M6,M7 --json-out ";
  REQUIRE(run(args + p("a.json") + " --report-out " + p("a.txt") + " > /dev/null") == 0);
  REQUIRE(run(args + p("b.json") + " --report-out " + p("b.txt") + " > /dev/null") == 0);
  CHECK(slurp(p("a.txt")) == slurp(p("b.txt")));
  CHECK(slurp(p("a.json")) == slurp(p("b.json")));
  CHECK_FALSE(slurp(p("a.txt")).empty());
}

TEST_CASE("seeds are required") {
  CHECK(run("train --data " + data_csv() + " --model-out " + p("x.json") + " > /dev/null 2>&1") != 0);
  CHECK(run("experiment --data " + data_csv() + " > /dev/null 2>&1") != 0);
}

}  // TEST_SUITE
