#include "sprt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sprt/errors.hpp"
#include "sprt/io.hpp"

namespace sprt {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc{} || r.ptr != end)
    throw std::invalid_argument("config: bad value for " + key + ": '" +
                                value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" +
                              value + "'");
}

std::vector<std::pair<double, double>> parse_sweep(const std::string& value) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("config: sweep entries are rho:alpha, got '" +
                                  item + "'");
    out.emplace_back(parse_number<double>("sweep", trim(item.substr(0, colon))),
                     parse_number<double>("sweep", trim(item.substr(colon + 1))));
  }
  return out;
}

}  // namespace

TestConfig ExperimentConfig::test_config() const {
  NoiseModel model = [&] {
    if (noise == "gaussian") return NoiseModel::gaussian();
    if (noise == "zero") return NoiseModel::zero();
    throw std::invalid_argument("config: unknown noise model '" + noise + "'");
  }();
  return TestConfig::from_alpha(rho, alpha, std::move(model), max_steps);
}

EnsembleOptions ExperimentConfig::ensemble_options() const {
  EnsembleOptions o;
  o.trials = trials;
  o.master_seed = master_seed;
  o.threads = threads;
  o.antithetic = antithetic;
  return o;
}

void apply_config_entry(ExperimentConfig& c, const std::string& key,
                        const std::string& value) {
  if (key == "rho")
    c.rho = parse_number<double>(key, value);
  else if (key == "alpha")
    c.alpha = parse_number<double>(key, value);
  else if (key == "noise")
    c.noise = value;
  else if (key == "max_steps")
    c.max_steps = parse_number<int>(key, value);
  else if (key == "trials")
    c.trials = parse_number<std::int64_t>(key, value);
  else if (key == "seed")
    c.master_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "threads")
    c.threads = parse_number<int>(key, value);
  else if (key == "antithetic")
    c.antithetic = parse_bool(key, value);
  else if (key == "oracle.enabled")
    c.oracle_enabled = parse_bool(key, value);
  else if (key == "oracle.grid_points")
    c.grid_points = parse_number<int>(key, value);
  else if (key == "sweep")
    c.sweep = parse_sweep(value);
  else if (key == "out")
    c.out = value;
  else if (key == "format")
    c.format = value;
  else if (key == "precision")
    c.precision = parse_number<int>(key, value);
  else
    throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot open config: " + path);
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value");
    apply_config_entry(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

void write_config_file(const ExperimentConfig& c, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for writing: " + path);
  f << "rho = " << format_double(c.rho, 17) << "\n";
  f << "alpha = " << format_double(c.alpha, 17) << "\n";
  f << "noise = " << c.noise << "\n";
  f << "max_steps = " << c.max_steps << "\n";
  f << "trials = " << c.trials << "\n";
  f << "seed = " << c.master_seed << "\n";
  f << "threads = " << c.threads << "\n";
  f << "antithetic = " << (c.antithetic ? "true" : "false") << "\n";
  f << "oracle.enabled = " << (c.oracle_enabled ? "true" : "false") << "\n";
  f << "oracle.grid_points = " << c.grid_points << "\n";
  if (!c.sweep.empty()) {
    f << "sweep = ";
    for (std::size_t i = 0; i < c.sweep.size(); ++i)
      f << (i ? ", " : "") << format_double(c.sweep[i].first, 17) << ":"
        << format_double(c.sweep[i].second, 17);
    f << "\n";
  }
  if (!c.out.empty()) f << "out = " << c.out << "\n";
  f << "format = " << c.format << "\n";
  f << "precision = " << c.precision << "\n";
  if (!f) throw io_error("write failed: " + path);
}

}  // namespace sprt
