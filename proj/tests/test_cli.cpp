#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(GENEAPERC_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("geneaperc-cli-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate is deterministic") {
    const auto a = fresh("sim-a"), b = fresh("sim-b");
    const std::string args = " --set model=bgw --set law='\"fig1\"' --seed 7 --set depth=4";
    REQUIRE(cli("simulate --out " + a.string() + args).code == 0);
    REQUIRE(cli("simulate --out " + b.string() + args).code == 0);
    CHECK(slurp(a / "tree.tsv") == slurp(b / "tree.tsv"));
    CHECK(slurp(a / "tree.dot") == slurp(b / "tree.dot"));
    CHECK(slurp(a / "manifest.json").find("\"seed\": 7") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("simulate summaries") {
    const auto dir = fresh("sim-ia");
    REQUIRE(cli("simulate --out " + dir.string() + " --set model=infinite-alleles --set r=1").code == 0);
    auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["alleleCount"] == summary["vertices"]);
    REQUIRE(cli("simulate --out " + dir.string() + " --set model=dac --set p=1 --set d=3").code == 0);
    summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["colorClasses"] == 1);
    CHECK(cli("simulate --out " + dir.string() + " --set model=potts").code == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("oracle table") {
    const auto dir = fresh("oracle");
    const Run r = cli("oracle --out " + dir.string() + " --set p='\"1/2\"'");
    CHECK(r.code == 0);
    CHECK(r.out == "outcome,numerator,denominator\n\"1\",1,4\n\"2\",1,2\n\"3\",1,4\n");
    CHECK(slurp(dir / "law.csv") == r.out);
    fs::remove_all(dir);
  }

  TEST_CASE("sweep and export") {
    const auto dir = fresh("sweep");
    const Run r = cli("sweep --out " + dir.string() +
                      " --set grid='{\"from\":\"1/10\",\"to\":\"9/10\",\"step\":\"1/10\"}' --set replicates=200"
                      " --set survivalDepth=10");
    CHECK(r.code == 0);
    const std::string plot = slurp(dir / "plot.csv");
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 10);
    CHECK(plot.rfind("x,y,ciLow,ciHigh\n", 0) == 0);
    const auto exp = fresh("export");
    CHECK(cli("export --input " + (dir / "estimates.csv").string() + " --out " + exp.string()).code == 0);
    CHECK(slurp(exp / "plot.csv") == plot);
    fs::remove_all(dir);
    fs::remove_all(exp);
  }

  TEST_CASE("estimate is independent of workers") {
    std::string first;
    for (int w : {1, 4, 8}) {
      const auto dir = fresh("est-" + std::to_string(w));
      REQUIRE(cli("estimate --out " + dir.string() + " --workers " + std::to_string(w) +
                  " --set grid='[0.4,0.5,0.6]' --set replicates=3000 --set chunk=100")
                  .code == 0);
      const std::string csv = slurp(dir / "estimates.csv");
      if (first.empty()) first = csv;
      CHECK(csv == first);
      fs::remove_all(dir);
    }
  }

  TEST_CASE("environment overrides and --set precedence") {
    const auto dir = fresh("env");
    const std::string base = "GENEAPERC_REPLICATES=123 " + std::string(GENEAPERC_CLI_PATH) + " estimate --out " +
                             dir.string() + " --set grid='[0.5]' --set survivalDepth=5";
    REQUIRE(std::system((base + " >/dev/null 2>&1").c_str()) == 0);
    CHECK(slurp(dir / "estimates.csv").find(",123,") != std::string::npos);
    REQUIRE(std::system((base + " --set replicates=77 >/dev/null 2>&1").c_str()) == 0);
    CHECK(slurp(dir / "estimates.csv").find(",77,") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("verify exit codes") {
    const auto dir = fresh("verify");
    const Run ok = cli("verify --suite extinction --out " + dir.string());
    CHECK(ok.code == 0);
    CHECK(ok.out.find("\"pass\":true") != std::string::npos);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(cli("verify --out " + dir.string()).code == 2);
    CHECK(cli("verify --suite nope --out " + dir.string()).code == 2);
    CHECK(cli("verify --suite correspondences --out " + dir.string()).code == 0);
    CHECK(cli("frobnicate").code == 2);
    fs::remove_all(dir);
  }
}
