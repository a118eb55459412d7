#include "sprt/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "sprt/errors.hpp"

namespace sprt {
namespace {

constexpr int kSchemaVersion = 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* hyp_suffix(int hx) { return hx == 0 ? "+1" : "-1"; }
const char* state_suffix(int u) {
  return u == 0 ? "+1" : (u == 1 ? "-1" : "eps");
}

std::string parse_fail(const std::string& path, const std::string& what) {
  return path + ": " + what;
}

double parse_double(const std::string& cell) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc{} || r.ptr != end)
    throw io_error("malformed numeric cell '" + cell + "'");
  return v;
}

std::int64_t parse_count(const std::string& cell) {
  std::int64_t v = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc{} || r.ptr != end)
    throw io_error("malformed count cell '" + cell + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Column layout shared by both formats. Conditional cells are the only
// ones that can be missing; masses and counts are always present (counts
// only on Monte Carlo tables).
std::vector<std::string> table_columns(bool with_counts) {
  std::vector<std::string> cols{"schema_version", "k"};
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b)
      cols.push_back(std::string("p_absorb_x") + hyp_suffix(hx) + "_u" +
                     state_suffix(b));
  for (int hx = 0; hx < 2; ++hx)
    cols.push_back(std::string("p_survive_x") + hyp_suffix(hx));
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b)
      cols.push_back(std::string("p_term_at_x") + hyp_suffix(hx) + "_u" +
                     state_suffix(b));
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b)
      cols.push_back(std::string("p_term_upto_x") + hyp_suffix(hx) + "_u" +
                     state_suffix(b));
  cols.push_back("p_survive");
  if (with_counts) {
    for (int hx = 0; hx < 2; ++hx)
      for (int b = 0; b < 2; ++b)
        cols.push_back(std::string("count_absorb_x") + hyp_suffix(hx) + "_u" +
                       state_suffix(b));
    for (int hx = 0; hx < 2; ++hx)
      cols.push_back(std::string("count_surv_x") + hyp_suffix(hx));
  }
  return cols;
}

// One row as strings; empty string encodes a missing cell.
std::vector<std::string> table_row(const EnsembleTable& t, int k,
                                   int precision, bool with_counts) {
  std::vector<std::string> row;
  row.push_back(std::to_string(kSchemaVersion));
  row.push_back(std::to_string(k));
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b)
      row.push_back(format_double(t.newly[hx][b](k), precision));
  for (int hx = 0; hx < 2; ++hx)
    row.push_back(format_double(t.surv[hx](k), precision));
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b) {
      const double v = t.term_at(k, hyp_at(hx), boundary_at(b));
      const bool ok = k >= 1 && t.confident_at(k, hyp_at(hx)) && !std::isnan(v);
      row.push_back(ok ? format_double(v, precision) : std::string());
    }
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b)
      row.push_back(
          format_double(t.term_upto(k, hyp_at(hx), boundary_at(b)), precision));
  row.push_back(format_double(t.survive(k), precision));
  if (with_counts) {
    for (int hx = 0; hx < 2; ++hx)
      for (int b = 0; b < 2; ++b)
        row.push_back(std::to_string(t.count_newly[hx][b](k)));
    for (int hx = 0; hx < 2; ++hx)
      row.push_back(std::to_string(t.count_surv[hx](k)));
  }
  return row;
}

nlohmann::ordered_json table_meta(const EnsembleTable& t,
                                  const std::string& data_file,
                                  FileFormat format, int precision,
                                  const nlohmann::ordered_json& extra) {
  nlohmann::ordered_json m;
  m["kind"] = "ensemble_table";
  m["schema_version"] = kSchemaVersion;
  m["data_file"] = data_file;
  m["format"] = format == FileFormat::csv ? "csv" : "json";
  m["precision"] = precision;
  m["source"] = t.is_oracle() ? "oracle" : "monte_carlo";
  m["horizon"] = t.horizon;
  m["trials_per_hypothesis"] = t.trials_per_hypothesis;
  m["rho"] = t.rho;
  m["alpha"] = t.alpha;
  m["threshold"] = t.threshold;
  m["censored_fraction"] = t.censored_fraction;
  m["mass_residual"] = t.mass_residual;
  m["tail_error_bound"] = t.tail_error_bound;  // NaN serializes as null
  m["count_floor"] = t.count_floor;
  m["mass_floor"] = t.mass_floor;
  for (const auto& [key, value] : extra.items()) m[key] = value;
  return m;
}

std::string basename_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open: " + path);
  return f;
}

void write_columnar_csv(const std::string& path,
                        const std::vector<std::string>& cols,
                        const std::vector<std::vector<std::string>>& rows) {
  auto f = open_out(path);
  for (std::size_t i = 0; i < cols.size(); ++i)
    f << (i ? "," : "") << cols[i];
  f << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      f << (i ? "," : "") << row[i];
    f << "\n";
  }
  if (!f) throw io_error("write failed: " + path);
}

void write_columnar_json(const std::string& path, const char* kind,
                         const std::vector<std::string>& cols,
                         const std::vector<std::vector<std::string>>& rows) {
  // Cells arrive preformatted so CSV and JSON carry identical values;
  // numbers are emitted raw, empties as null.
  auto f = open_out(path);
  f << "{\n  \"kind\": \"" << kind << "\",\n  \"schema_version\": "
    << kSchemaVersion << ",\n  \"columns\": [";
  for (std::size_t i = 0; i < cols.size(); ++i)
    f << (i ? ", " : "") << '"' << cols[i] << '"';
  f << "],\n  \"rows\": [\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    f << "    [";
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      f << (i ? ", " : "");
      if (rows[r][i].empty())
        f << "null";
      else
        f << rows[r][i];
    }
    f << (r + 1 < rows.size() ? "],\n" : "]\n");
  }
  f << "  ]\n}\n";
  if (!f) throw io_error("write failed: " + path);
}

struct ParsedRows {
  std::vector<std::string> cols;
  std::vector<std::vector<std::string>> rows;  // empty string = missing
};

ParsedRows read_columnar_csv(const std::string& path) {
  auto f = open_in(path);
  ParsedRows out;
  std::string line;
  if (!std::getline(f, line))
    throw io_error(parse_fail(path, "empty file"));
  out.cols = split_csv(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != out.cols.size())
      throw io_error(parse_fail(path, "row width does not match header"));
    out.rows.push_back(std::move(cells));
  }
  return out;
}

ParsedRows read_columnar_json(const std::string& path) {
  auto f = open_in(path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(parse_fail(path, e.what()));
  }
  ParsedRows out;
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
      throw io_error(parse_fail(path, "unsupported schema version"));
    for (const auto& c : j.at("columns"))
      out.cols.push_back(c.get<std::string>());
    for (const auto& row : j.at("rows")) {
      std::vector<std::string> cells;
      for (const auto& cell : row) {
        if (cell.is_null())
          cells.emplace_back();
        else if (cell.is_number_integer())
          cells.push_back(std::to_string(cell.get<std::int64_t>()));
        else
          cells.push_back(format_double(cell.get<double>(), 17));
      }
      if (cells.size() != out.cols.size())
        throw io_error(parse_fail(path, "row width does not match columns"));
      out.rows.push_back(std::move(cells));
    }
  } catch (const nlohmann::json::exception& e) {
    throw io_error(parse_fail(path, e.what()));
  }
  return out;
}

}  // namespace

FileFormat format_from_name(const std::string& name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "json") return FileFormat::json;
  throw std::invalid_argument("unknown format '" + name +
                              "' (expected csv or json)");
}

FileFormat format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot != std::string::npos && path.substr(dot) == ".json")
    return FileFormat::json;
  return FileFormat::csv;
}

std::string sidecar_path(const std::string& data_path) {
  const auto slash = data_path.find_last_of('/');
  const auto dot = data_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return data_path + ".meta.json";
  return data_path.substr(0, dot) + ".meta.json";
}

std::string format_double(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                               std::chars_format::general, precision);
  return std::string(buf.data(), r.ptr);
}

void write_table(const EnsembleTable& t, const std::string& path,
                 FileFormat format, int precision,
                 const nlohmann::ordered_json& extra_meta) {
  const bool with_counts = t.has_counts();
  const auto cols = table_columns(with_counts);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(t.horizon + 1);
  for (int k = 0; k <= t.horizon; ++k)
    rows.push_back(table_row(t, k, precision, with_counts));
  if (format == FileFormat::csv)
    write_columnar_csv(path, cols, rows);
  else
    write_columnar_json(path, "ensemble_table", cols, rows);
  write_json_file(
      table_meta(t, basename_of(path), format, precision, extra_meta),
      sidecar_path(path));
}

EnsembleTable read_table(const std::string& path) {
  nlohmann::json meta;
  {
    auto f = open_in(sidecar_path(path));
    try {
      f >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw io_error(parse_fail(sidecar_path(path), e.what()));
    }
  }

  EnsembleTable t;
  try {
    if (meta.at("kind").get<std::string>() != "ensemble_table" ||
        meta.at("schema_version").get<int>() != kSchemaVersion)
      throw io_error(
          parse_fail(sidecar_path(path), "unsupported table schema"));
    t.source = meta.at("source").get<std::string>() == "oracle"
                   ? TableSource::oracle
                   : TableSource::monte_carlo;
    t.horizon = meta.at("horizon").get<int>();
    t.trials_per_hypothesis = meta.at("trials_per_hypothesis").get<std::int64_t>();
    t.rho = meta.at("rho").get<double>();
    t.alpha = meta.at("alpha").get<double>();
    t.threshold = meta.at("threshold").get<double>();
    t.censored_fraction = meta.at("censored_fraction").get<double>();
    t.mass_residual = meta.at("mass_residual").is_null()
                          ? kNaN
                          : meta.at("mass_residual").get<double>();
    t.tail_error_bound = meta.at("tail_error_bound").is_null()
                             ? kNaN
                             : meta.at("tail_error_bound").get<double>();
    t.count_floor = meta.at("count_floor").get<std::int64_t>();
    t.mass_floor = meta.at("mass_floor").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error(parse_fail(sidecar_path(path), e.what()));
  }
  if (t.horizon < 0) throw io_error(parse_fail(path, "negative horizon"));

  const ParsedRows data = format_from_path(path) == FileFormat::csv
                              ? read_columnar_csv(path)
                              : read_columnar_json(path);
  auto col = [&](const std::string& name, bool required) {
    for (std::size_t i = 0; i < data.cols.size(); ++i)
      if (data.cols[i] == name) return static_cast<int>(i);
    if (required)
      throw io_error(parse_fail(path, "missing column " + name));
    return -1;
  };

  const int c_version = col("schema_version", true);
  const int c_k = col("k", true);
  int c_absorb[2][2], c_surv[2], c_cnt[2][2], c_cnt_surv[2];
  bool with_counts = true;
  for (int hx = 0; hx < 2; ++hx) {
    for (int b = 0; b < 2; ++b) {
      const std::string tail =
          std::string("_x") + hyp_suffix(hx) + "_u" + state_suffix(b);
      c_absorb[hx][b] = col("p_absorb" + tail, true);
      c_cnt[hx][b] = col("count_absorb" + tail, false);
      with_counts = with_counts && c_cnt[hx][b] >= 0;
    }
    c_surv[hx] = col(std::string("p_survive_x") + hyp_suffix(hx), true);
    c_cnt_surv[hx] = col(std::string("count_surv_x") + hyp_suffix(hx), false);
    with_counts = with_counts && c_cnt_surv[hx] >= 0;
  }

  for (int hx = 0; hx < 2; ++hx) {
    t.surv[hx] = Eigen::ArrayXd::Zero(t.horizon + 1);
    if (with_counts) t.count_surv[hx] = CountArray::Zero(t.horizon + 1);
    for (int b = 0; b < 2; ++b) {
      t.newly[hx][b] = Eigen::ArrayXd::Zero(t.horizon + 1);
      if (with_counts) t.count_newly[hx][b] = CountArray::Zero(t.horizon + 1);
    }
  }

  if (static_cast<int>(data.rows.size()) != t.horizon + 1)
    throw io_error(parse_fail(path, "row count does not match horizon"));
  for (const auto& row : data.rows) {
    if (parse_count(row[c_version]) != kSchemaVersion)
      throw io_error(parse_fail(path, "unsupported schema version"));
    const std::int64_t k64 = parse_count(row[c_k]);
    if (k64 < 0 || k64 > t.horizon)
      throw io_error(parse_fail(path, "time index out of range"));
    const int k = static_cast<int>(k64);
    for (int hx = 0; hx < 2; ++hx) {
      t.surv[hx](k) = parse_double(row[c_surv[hx]]);
      if (with_counts)
        t.count_surv[hx](k) = parse_count(row[c_cnt_surv[hx]]);
      for (int b = 0; b < 2; ++b) {
        t.newly[hx][b](k) = parse_double(row[c_absorb[hx][b]]);
        if (with_counts)
          t.count_newly[hx][b](k) = parse_count(row[c_cnt[hx][b]]);
      }
    }
  }

  // Counts are the authoritative Monte Carlo data; rebuild the masses from
  // them so a truncated precision setting cannot skew downstream ratios.
  if (with_counts && t.trials_per_hypothesis > 0) {
    const double n = static_cast<double>(t.trials_per_hypothesis);
    for (int hx = 0; hx < 2; ++hx) {
      t.surv[hx] = t.count_surv[hx].cast<double>() / n;
      for (int b = 0; b < 2; ++b)
        t.newly[hx][b] = t.count_newly[hx][b].cast<double>() / n;
    }
  }
  try {
    t.finalize();
  } catch (const std::invalid_argument& e) {
    throw io_error(parse_fail(path, e.what()));
  }
  return t;
}

void write_curve(const InfoCurve& c, const EnsembleTable& t,
                 const std::string& path, FileFormat format, int precision) {
  std::vector<std::string> cols{"schema_version",
                                "k",
                                "mi",
                                "mi_closed",
                                "mi_increment",
                                "mi_increment_erasure",
                                "kappa_at",
                                "kappa_upto"};
  for (int hx = 0; hx < 2; ++hx)
    for (int u = 0; u < 3; ++u)
      cols.push_back(std::string("i_x") + hyp_suffix(hx) + "_u" +
                     state_suffix(u));
  for (int hx = 0; hx < 2; ++hx)
    for (int a = 0; a < 3; ++a)
      for (int u = 0; u < 3; ++u)
        cols.push_back(std::string("ic_x") + hyp_suffix(hx) + "_p" +
                       state_suffix(a) + "_u" + state_suffix(u));

  auto cell = [&](double v) {
    return std::isfinite(v) ? format_double(v, precision) : std::string();
  };
  std::vector<std::vector<std::string>> rows;
  rows.reserve(c.horizon + 1);
  for (int k = 0; k <= c.horizon; ++k) {
    std::vector<std::string> row{std::to_string(kSchemaVersion),
                                 std::to_string(k),
                                 cell(c.mi(k)),
                                 cell(c.mi_closed(k)),
                                 cell(c.mi_increment(k)),
                                 cell(c.mi_increment_erasure(k)),
                                 cell(c.kappa_at(k)),
                                 cell(c.kappa_upto(k))};
    for (int hx = 0; hx < 2; ++hx)
      for (int u = 0; u < 3; ++u) row.push_back(cell(c.density[hx][u](k)));
    for (int hx = 0; hx < 2; ++hx)
      for (int a = 0; a < 3; ++a)
        for (int u = 0; u < 3; ++u)
          row.push_back(cell(c.cond_density[hx][a][u](k)));
    rows.push_back(std::move(row));
  }
  if (format == FileFormat::csv)
    write_columnar_csv(path, cols, rows);
  else
    write_columnar_json(path, "info_curve", cols, rows);

  nlohmann::ordered_json m;
  m["kind"] = "info_curve";
  m["schema_version"] = kSchemaVersion;
  m["data_file"] = basename_of(path);
  m["horizon"] = c.horizon;
  m["alpha_hat"] = c.alpha_hat;
  m["mi_final"] = c.mi_final;
  m["rho"] = t.rho;
  m["alpha"] = t.alpha;
  m["source"] = t.is_oracle() ? "oracle" : "monte_carlo";
  write_json_file(m, sidecar_path(path));
}

nlohmann::ordered_json checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json j;
  j["kind"] = "verification_report";
  j["schema_version"] = kSchemaVersion;
  j["all_gated_pass"] = all_gated_pass(checks);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json r;
    r["name"] = c.name;
    r["residual"] = c.residual;    // NaN -> null
    r["tolerance"] = c.tolerance;  // NaN -> null (informational)
    r["gated"] = c.gated;
    r["pass"] = c.pass;
    r["note"] = c.note;
    rows.push_back(std::move(r));
  }
  j["checks"] = std::move(rows);
  return j;
}

nlohmann::ordered_json sweep_json(const std::vector<SweepSeries>& series) {
  nlohmann::ordered_json j;
  j["kind"] = "sweep_report";
  j["schema_version"] = kSchemaVersion;
  bool ok = true;
  for (const auto& s : series) ok = ok && (!s.gated || s.decreasing);
  j["all_gated_pass"] = ok;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : series) {
    nlohmann::ordered_json r;
    r["name"] = s.name;
    r["rho"] = s.rho;
    r["value"] = s.value;
    r["decreasing"] = s.decreasing;
    r["defect"] = s.defect;
    r["gated"] = s.gated;
    rows.push_back(std::move(r));
  }
  j["series"] = std::move(rows);
  return j;
}

nlohmann::ordered_json stats_json(const DecisionTimeStats& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["censored_fraction"] = s.censored_fraction;
  j["wald_approximation"] = s.wald_approximation;
  auto q = nlohmann::ordered_json::object();
  for (const auto& [level, value] : s.quantiles)
    q[format_double(level, 17)] = value;
  j["quantiles"] = std::move(q);
  return j;
}

void write_json_file(const nlohmann::ordered_json& j, const std::string& path) {
  auto f = open_out(path);
  f << j.dump(2) << "\n";
  if (!f) throw io_error("write failed: " + path);
}

void print_checks(std::ostream& os, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    const char* status = !c.gated ? "INFO" : (c.pass ? "PASS" : "FAIL");
    os << status << "  " << std::left << std::setw(34) << c.name
       << " residual=" << std::setw(12) << format_double(c.residual, 6);
    if (c.gated) os << " tol=" << format_double(c.tolerance, 6);
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  }
}

void print_sweep(std::ostream& os, const std::vector<SweepSeries>& series) {
  for (const auto& s : series) {
    const char* status = !s.gated ? "INFO" : (s.decreasing ? "PASS" : "FAIL");
    os << status << "  " << std::left << std::setw(28) << s.name;
    for (std::size_t i = 0; i < s.rho.size(); ++i)
      os << "  rho=" << format_double(s.rho[i], 6) << ":"
         << format_double(s.value[i], 6);
    os << (s.decreasing ? "  decreasing" : "  not decreasing") << "\n";
  }
}

}  // namespace sprt
