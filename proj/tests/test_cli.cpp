#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("sprt_cli_test_" + std::to_string(++counter));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& capture = "") {
  std::string cmd = std::string(SPRTLAB_BIN) + " " + args;
  cmd += capture.empty() ? " >/dev/null 2>&1" : " >" + capture + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage surface: version, help, argument errors") {
  CHECK(run("--version") == 0);
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);                    // a subcommand is required
  CHECK(run("simulate --bogus-flag") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("domain violations exit with the configuration code") {
  CHECK(run("simulate --alpha 0.7 --trials 10") == 2);
  CHECK(run("simulate --rho -1 --trials 10") == 2);
  CHECK(run("simulate --trials 0") == 2);
  CHECK(run("oracle --noise zero") == 2);
  CHECK(run("simulate --noise warbly --trials 10") == 2);
}

TEST_CASE("unwritable output paths exit with the io code") {
  CHECK(run("simulate --trials 20 --max-steps 50 "
            "--out /nonexistent_dir_sprt/t.csv") == 3);
}

TEST_CASE("simulation runs are deterministic per seed") {
  const TempDir tmp;
  const std::string base = "simulate --rho 0.1 --alpha 0.2 --trials 500 "
                           "--threads 2 --seed 5 --out ";
  CHECK(run(base + tmp.path("a.csv")) == 0);
  CHECK(run(base + tmp.path("b.csv")) == 0);
  CHECK(slurp(tmp.path("a.csv")) == slurp(tmp.path("b.csv")));
  CHECK(run("simulate --rho 0.1 --alpha 0.2 --trials 500 --threads 2 "
            "--seed 6 --out " + tmp.path("c.csv")) == 0);
  CHECK(slurp(tmp.path("a.csv")) != slurp(tmp.path("c.csv")));

  // json output parses and carries the sidecar
  CHECK(run("simulate --rho 0.1 --alpha 0.2 --trials 200 --seed 5 "
            "--format json --out " + tmp.path("t.json")) == 0);
  nlohmann::json j;
  std::ifstream(tmp.path("t.json")) >> j;
  CHECK(j.at("rows").size() == 351);
  CHECK(fs::exists(tmp.path("t.meta.json")));
}

TEST_CASE("short horizons warn about censoring and report failure when empty") {
  const TempDir tmp;
  // zero noise cannot decide within 8 steps: everything is censored
  CHECK(run("simulate --noise zero --trials 50 --max-steps 8",
            tmp.path("log1.txt")) == 2);
  CHECK(slurp(tmp.path("log1.txt")).find("censor") != std::string::npos);

  // a tight gaussian horizon decides a fraction and warns about the rest
  CHECK(run("simulate --trials 500 --seed 1 --max-steps 60",
            tmp.path("log2.txt")) == 0);
  CHECK(slurp(tmp.path("log2.txt")).find("censor") != std::string::npos);
}

TEST_CASE("verify cross-validates stored tables against a stored oracle") {
  const TempDir tmp;
  const std::string mc = tmp.path("mc.csv");
  const std::string orc = tmp.path("oracle.csv");
  const std::string rep = tmp.path("report.json");
  REQUIRE(run("simulate --trials 3000 --seed 2 --out " + mc) == 0);
  REQUIRE(run("oracle --grid-points 1024 --out " + orc) == 0);

  CHECK(run("verify --table " + mc + " --against " + orc + " --out " + rep,
            tmp.path("log.txt")) == 0);
  nlohmann::json j;
  std::ifstream(rep) >> j;
  CHECK(j.at("all_gated_pass") == true);
  CHECK(j.at("sections").size() == 3);
  const std::string text = slurp(tmp.path("log.txt"));
  CHECK(text.find("pair_cumulative_cells") != std::string::npos);
  CHECK(text.find("verification PASS") != std::string::npos);

  // single-table battery on the oracle alone
  CHECK(run("verify --table " + orc) == 0);

  // cross-validation needs an oracle on the right-hand side
  CHECK(run("verify --table " + mc + " --against " + mc) == 2);

  // a parameter mismatch is a verification failure, not a crash
  const std::string other = tmp.path("other.csv");
  REQUIRE(run("oracle --rho 0.05 --grid-points 1024 --out " + other) == 0);
  CHECK(run("verify --table " + mc + " --against " + other) == 1);
}

TEST_CASE("verify generates its own ensembles when no table is given") {
  const TempDir tmp;
  const std::string rep = tmp.path("report.json");
  CHECK(run("verify --trials 4000 --seed 1 --grid-points 1024 --out " + rep) ==
        0);
  nlohmann::json j;
  std::ifstream(rep) >> j;
  CHECK(j.at("all_gated_pass") == true);
  CHECK(j.at("sections").size() == 3);  // ensemble, oracle, cross-validation
}

TEST_CASE("sweep aggregates decay series and fails honestly") {
  const TempDir tmp;
  const std::string out = tmp.path("sweep.json");
  // one point cannot show decay
  CHECK(run("sweep --sweep 0.2:0.1 --out " + out) == 2);

  // the flatness series measured on this grid does not decrease: exit 1
  // while still writing the full evidence file
  CHECK(run("sweep --sweep \"0.2:0.1, 0.1:0.1\" --grid-points 1024 --out " +
            out, tmp.path("log.txt")) == 1);
  nlohmann::json j;
  std::ifstream(out) >> j;
  bool saw_flatness = false;
  for (const auto& s : j.at("series"))
    saw_flatness = saw_flatness || s.at("name") == "kappa_flatness";
  CHECK(saw_flatness);
  CHECK(slurp(tmp.path("log.txt")).find("kappa_median_gap") !=
        std::string::npos);
}

TEST_CASE("config files drive runs and flags override them") {
  const TempDir tmp;
  const std::string cfg = tmp.path("run.cfg");
  const std::string out = tmp.path("from_cfg.csv");
  std::ofstream(cfg) << "rho = 0.1\nalpha = 0.2\ntrials = 300\nseed = 9\n"
                     << "threads = 1\nout = " << out << "\n";
  CHECK(run("simulate --config " + cfg) == 0);
  CHECK(fs::exists(out));

  nlohmann::json meta;
  std::ifstream(tmp.path("from_cfg.meta.json")) >> meta;
  CHECK(meta.at("rho") == 0.1);
  CHECK(meta.at("trials_per_hypothesis") == 300);

  // flag overrides the file value
  CHECK(run("simulate --config " + cfg + " --trials 120 --out " +
            tmp.path("override.csv")) == 0);
  nlohmann::json meta2;
  std::ifstream(tmp.path("override.meta.json")) >> meta2;
  CHECK(meta2.at("trials_per_hypothesis") == 120);

  std::ofstream(tmp.path("bad.cfg")) << "frobnication = 7\n";
  CHECK(run("simulate --config " + tmp.path("bad.cfg")) == 2);
  CHECK(run("simulate --config " + tmp.path("missing.cfg")) == 3);
}
