#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sprt/ensemble.hpp"
#include "sprt/errors.hpp"
#include "sprt/info.hpp"
#include "sprt/io.hpp"
#include "sprt/oracle.hpp"

using namespace sprt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("sprt_io_test_" + std::to_string(++counter));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

EnsembleTable sample_table(std::int64_t trials = 400) {
  EnsembleOptions o;
  o.trials = trials;
  o.master_seed = 3;
  o.threads = 1;
  return run_ensemble(TestConfig::from_alpha(0.1, 0.2), o);
}

void check_tables_equal(const EnsembleTable& a, const EnsembleTable& b) {
  CHECK(a.source == b.source);
  CHECK(a.horizon == b.horizon);
  CHECK(a.trials_per_hypothesis == b.trials_per_hypothesis);
  CHECK(a.rho == b.rho);
  CHECK(a.alpha == b.alpha);
  CHECK(a.threshold == b.threshold);
  CHECK(a.censored_fraction == b.censored_fraction);
  CHECK(a.count_floor == b.count_floor);
  CHECK(a.mass_floor == b.mass_floor);
  for (int x = 0; x < 2; ++x) {
    CHECK((a.surv[x] == b.surv[x]).all());
    if (a.has_counts()) CHECK((a.count_surv[x] == b.count_surv[x]).all());
    for (int u = 0; u < 2; ++u) {
      CHECK((a.newly[x][u] == b.newly[x][u]).all());
      CHECK((a.cum[x][u] == b.cum[x][u]).all());
      if (a.has_counts())
        CHECK((a.count_newly[x][u] == b.count_newly[x][u]).all());
    }
  }
}

}  // namespace

TEST_CASE("doubles format losslessly at full precision") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5e17, 0.0}) {
    const std::string s = format_double(v, 17);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN(), 17) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity(), 17) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity(), 17) == "-inf");
  CHECK(format_double(0.125, 6) == "0.125");
}

TEST_CASE("formats and sidecar paths are derived from names") {
  CHECK(format_from_name("csv") == FileFormat::csv);
  CHECK(format_from_name("json") == FileFormat::json);
  CHECK_THROWS_AS(format_from_name("xml"), std::invalid_argument);
  CHECK(format_from_path("a/b.json") == FileFormat::json);
  CHECK(format_from_path("a/b.csv") == FileFormat::csv);
  CHECK(sidecar_path("t.csv") == "t.meta.json");
  CHECK(sidecar_path("dir/run.data.json") == "dir/run.data.meta.json");
}

TEST_CASE("monte carlo tables round-trip through both formats") {
  const TempDir tmp;
  const EnsembleTable t = sample_table();

  for (const char* name : {"t.csv", "t.json"}) {
    const std::string p = tmp.path(name);
    write_table(t, p, format_from_path(p));
    const EnsembleTable r = read_table(p);
    check_tables_equal(t, r);

    // rewriting the reread table reproduces the data file byte for byte
    const std::string p2 = tmp.path(std::string("again_") + name);
    write_table(r, p2, format_from_path(p2));
    CHECK(slurp(p) == slurp(p2));
  }
}

TEST_CASE("counts stay authoritative under truncated precision") {
  const TempDir tmp;
  const EnsembleTable t = sample_table();
  const std::string p = tmp.path("rounded.csv");
  write_table(t, p, FileFormat::csv, 6);
  const EnsembleTable r = read_table(p);
  for (int x = 0; x < 2; ++x) {
    CHECK((r.count_surv[x] == t.count_surv[x]).all());
    CHECK((r.surv[x] == t.surv[x]).all());  // rebuilt from the counts
  }
}

TEST_CASE("oracle tables round-trip exactly") {
  const TempDir tmp;
  const EnsembleTable t =
      oracle_tables(propagate(TestConfig::from_alpha(0.04, 0.1), 150, 512));
  const std::string p = tmp.path("oracle.json");
  write_table(t, p, FileFormat::json);
  const EnsembleTable r = read_table(p);
  CHECK(r.is_oracle());
  CHECK_FALSE(r.has_counts());
  check_tables_equal(t, r);
  CHECK(r.mass_residual == t.mass_residual);
  CHECK(r.tail_error_bound == t.tail_error_bound);
}

TEST_CASE("low-confidence conditional cells are written empty, never zero") {
  const TempDir tmp;
  const EnsembleTable t = sample_table(50);  // below the count floor everywhere
  const std::string pc = tmp.path("small.csv");
  const std::string pj = tmp.path("small.json");
  write_table(t, pc, FileFormat::csv);
  write_table(t, pj, FileFormat::json);

  std::ifstream csv(pc);
  std::string header, line;
  std::getline(csv, header);
  std::stringstream hs(header);
  std::vector<std::string> cols;
  for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
  int c_term = -1;
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] == "p_term_at_x+1_u+1") c_term = static_cast<int>(i);
  REQUIRE(c_term >= 0);
  while (std::getline(csv, line)) {
    std::stringstream ls(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    cells.resize(cols.size());
    CHECK(cells[c_term].empty());
  }

  nlohmann::json j;
  std::ifstream(pj) >> j;
  int j_term = -1;
  const auto& jcols = j.at("columns");
  for (std::size_t i = 0; i < jcols.size(); ++i)
    if (jcols[i] == "p_term_at_x+1_u+1") j_term = static_cast<int>(i);
  REQUIRE(j_term >= 0);
  for (const auto& row : j.at("rows")) CHECK(row[j_term].is_null());
}

TEST_CASE("schema violations and corrupted counts are io errors") {
  const TempDir tmp;
  const EnsembleTable t = sample_table();
  const std::string p = tmp.path("t.csv");
  write_table(t, p, FileFormat::csv);

  SUBCASE("missing sidecar") {
    fs::remove(sidecar_path(p));
    CHECK_THROWS_AS(read_table(p), io_error);
  }
  SUBCASE("wrong schema version") {
    nlohmann::json meta;
    std::ifstream(sidecar_path(p)) >> meta;
    meta["schema_version"] = 99;
    spit(sidecar_path(p), meta.dump(2));
    CHECK_THROWS_AS(read_table(p), io_error);
  }
  SUBCASE("wrong kind") {
    nlohmann::json meta;
    std::ifstream(sidecar_path(p)) >> meta;
    meta["kind"] = "something_else";
    spit(sidecar_path(p), meta.dump(2));
    CHECK_THROWS_AS(read_table(p), io_error);
  }
  SUBCASE("missing column") {
    std::string text = slurp(p);
    text.replace(text.find("p_survive_x+1"), 13, "p_surviveXx+1");
    spit(p, text);
    CHECK_THROWS_AS(read_table(p), io_error);
  }
  SUBCASE("counts exceeding the trial budget") {
    // find a row with a nonzero absorption count and inflate it
    std::string text = slurp(p);
    const std::string needle = "\n1,3,";
    const std::size_t row = text.find(needle);
    REQUIRE(row != std::string::npos);
    const std::size_t eol = text.find('\n', row + 1);
    std::string line = text.substr(row + 1, eol - row - 1);
    const std::size_t last = line.rfind(',');
    const std::size_t prev = line.rfind(',', last - 1);
    const std::size_t prev2 = line.rfind(',', prev - 1);
    line.replace(prev2 + 1, prev - prev2 - 1, "1000000");
    text.replace(row + 1, eol - row - 1, line);
    spit(p, text);
    CHECK_THROWS_AS(read_table(p), io_error);
  }
  SUBCASE("unreadable path") {
    CHECK_THROWS_AS(read_table(tmp.path("absent.csv")), io_error);
  }
}

TEST_CASE("info curves export with finite cells only") {
  const TempDir tmp;
  const EnsembleTable t = sample_table(2000);
  const InfoCurve c = build_info_curve(t);
  const std::string p = tmp.path("curve.csv");
  write_curve(c, t, p, FileFormat::csv);

  std::ifstream csv(p);
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(header.find("mi_increment_erasure") != std::string::npos);
  CHECK(header.find("kappa_at") != std::string::npos);
  // k = 0: the per-step ratio is undefined and must be an empty cell
  std::stringstream hs(header), ls(first);
  std::vector<std::string> cols, cells;
  for (std::string v; std::getline(hs, v, ',');) cols.push_back(v);
  for (std::string v; std::getline(ls, v, ',');) cells.push_back(v);
  cells.resize(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] == "kappa_at") CHECK(cells[i].empty());

  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == t.horizon);  // header + k=0 already consumed
}

TEST_CASE("check reports serialize with their metadata") {
  const TempDir tmp;
  std::vector<CheckResult> checks;
  checks.push_back({"alpha_bound", 0.5, 1.0, true, true, "demo"});
  checks.push_back({"drift", 2.0, 0.0, false, true, ""});
  const nlohmann::ordered_json j = checks_json(checks);
  const std::string p = tmp.path("checks.json");
  write_json_file(j, p);

  nlohmann::json r;
  std::ifstream(p) >> r;
  CHECK(r.at("kind") == "verification_report");
  CHECK(r.at("all_gated_pass") == true);
  const auto& rows = r.at("checks");
  REQUIRE(rows.is_array());
  CHECK(rows.size() == 2);
  CHECK(rows[0].at("name") == "alpha_bound");
  CHECK(rows[0].at("pass") == true);
  CHECK(rows[0].at("gated") == true);
  CHECK(rows[0].at("note") == "demo");
  CHECK(rows[1].at("gated") == false);
}
