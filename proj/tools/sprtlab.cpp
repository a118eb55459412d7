#include <chrono>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sprt/config.hpp"
#include "sprt/engine.hpp"
#include "sprt/ensemble.hpp"
#include "sprt/errors.hpp"
#include "sprt/info.hpp"
#include "sprt/io.hpp"
#include "sprt/model.hpp"
#include "sprt/oracle.hpp"
#include "sprt/verify.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using sprt::EnsembleTable;
using sprt::ExperimentConfig;
using sprt::FileFormat;

struct FlagSet {
  std::string config_path;
  double rho = 0.0, alpha = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  int max_steps = 0, threads = 0, grid_points = 0, precision = 0;
  std::string noise, out, format;
  bool antithetic = false;
};

void add_common(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--config", f.config_path,
                  "Config file (key = value lines); flags override");
  cmd->add_option("--alpha", f.alpha, "Target error probability in (0, 0.5)");
  cmd->add_option("--rho", f.rho, "Signal-to-noise parameter, rho > 0");
  cmd->add_option("--max-steps", f.max_steps,
                  "Horizon; 0 picks 50*ceil(T/(2 rho))");
  cmd->add_option("--noise", f.noise, "Noise model: gaussian | zero");
  cmd->add_option("--seed", f.seed, "Master seed for the trajectory streams");
  cmd->add_option("--trials", f.trials, "Trajectories per hypothesis");
  cmd->add_option("--threads", f.threads, "Worker threads; 0 = hardware");
  cmd->add_flag("--antithetic", f.antithetic,
                "Drive X=-1 with the negated X=+1 noise streams");
  cmd->add_option("--grid-points", f.grid_points, "Oracle grid resolution");
  cmd->add_option("--out", f.out, "Output data file (sidecar written beside)");
  cmd->add_option("--format", f.format, "Output format: csv | json");
  cmd->add_option("--precision", f.precision,
                  "Significant digits in data files");
}

ExperimentConfig merge(const CLI::App* cmd, const FlagSet& f) {
  ExperimentConfig c;
  if (cmd->count("--config")) c = sprt::read_config_file(f.config_path);
  if (cmd->count("--rho")) c.rho = f.rho;
  if (cmd->count("--alpha")) c.alpha = f.alpha;
  if (cmd->count("--max-steps")) c.max_steps = f.max_steps;
  if (cmd->count("--noise")) c.noise = f.noise;
  if (cmd->count("--seed")) c.master_seed = f.seed;
  if (cmd->count("--trials")) c.trials = f.trials;
  if (cmd->count("--threads")) c.threads = f.threads;
  if (cmd->count("--antithetic")) c.antithetic = f.antithetic;
  if (cmd->count("--grid-points")) c.grid_points = f.grid_points;
  if (cmd->count("--out")) c.out = f.out;
  if (cmd->count("--format")) c.format = f.format;
  if (cmd->count("--precision")) c.precision = f.precision;
  return c;
}

std::string iso_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

nlohmann::ordered_json run_meta(const ExperimentConfig& c, double elapsed) {
  nlohmann::ordered_json m;
  m["master_seed"] = c.master_seed;
  m["threads"] = c.threads;
  m["antithetic"] = c.antithetic;
  m["software_version"] = std::string("sprtlab ") + kVersion;
  m["created_utc"] = iso_now();
  m["elapsed_seconds"] = elapsed;
  return m;
}

double decided_mass(const EnsembleTable& t) {
  double d = 0.0;
  for (int hx = 0; hx < 2; ++hx)
    for (int b = 0; b < 2; ++b) d += 0.5 * t.cum[hx][b](t.horizon);
  return d;
}

void print_table_summary(const EnsembleTable& t) {
  std::cout << "  horizon " << t.horizon << ", censored_fraction "
            << sprt::format_double(t.censored_fraction, 6) << "\n";
  std::cout << "  P(U=+1|X=+1) limit "
            << sprt::format_double(t.cum[0][0](t.horizon), 8)
            << ", alpha_hat "
            << sprt::format_double(sprt::empirical_alpha(t), 8) << "\n";
  if (decided_mass(t) > 0.0) {
    const sprt::DecisionTimeStats st = sprt::decision_time_stats(t);
    std::cout << "  decision time mean "
              << sprt::format_double(st.mean, 8) << " (zero-overshoot approx "
              << sprt::format_double(st.wald_approximation, 6) << ")\n";
  } else {
    std::cout << "  no decided trajectories\n";
  }
}

void write_outputs(const EnsembleTable& t, const ExperimentConfig& cfg,
                   bool with_curve, const nlohmann::ordered_json& meta) {
  if (cfg.out.empty()) return;
  const FileFormat fmt = sprt::format_from_name(cfg.format);
  sprt::write_table(t, cfg.out, fmt, cfg.precision, meta);
  std::cout << "wrote " << cfg.out << " and " << sprt::sidecar_path(cfg.out)
            << "\n";
  if (with_curve) {
    const std::string cpath = with_suffix(cfg.out, ".curve");
    sprt::write_curve(sprt::build_info_curve(t), t, cpath, fmt, cfg.precision);
    std::cout << "wrote " << cpath << "\n";
  }
}

int run_simulate(const ExperimentConfig& cfg, bool with_curve) {
  const sprt::TestConfig tc = cfg.test_config();
  const auto t0 = std::chrono::steady_clock::now();
  EnsembleTable table = sprt::run_ensemble(tc, cfg.ensemble_options());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::cout << "simulate: rho " << sprt::format_double(cfg.rho, 6)
            << ", alpha " << sprt::format_double(cfg.alpha, 6) << ", trials "
            << cfg.trials << " per hypothesis, seed " << cfg.master_seed
            << "\n";
  print_table_summary(table);
  if (table.censored_fraction >= 1e-3)
    std::cerr << "warning: censored_fraction = "
              << sprt::format_double(table.censored_fraction, 6)
              << "; horizon " << table.horizon
              << " truncates the decision-time distribution\n";

  nlohmann::ordered_json meta = run_meta(cfg, elapsed);
  meta["alpha_hat"] = sprt::empirical_alpha(table);
  if (decided_mass(table) > 0.0)
    meta["decision_time"] = sprt::stats_json(sprt::decision_time_stats(table));
  write_outputs(table, cfg, with_curve, meta);
  return decided_mass(table) > 0.0 ? 0 : 2;
}

int run_oracle(const ExperimentConfig& cfg, bool with_curve) {
  const sprt::TestConfig tc = cfg.test_config();
  sprt::OracleOptions oo;
  oo.grid_points = cfg.grid_points;
  const auto t0 = std::chrono::steady_clock::now();
  const sprt::OracleGrid grid = sprt::propagate(tc, oo);
  EnsembleTable table = sprt::oracle_tables(grid);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::cout << "oracle: rho " << sprt::format_double(cfg.rho, 6) << ", alpha "
            << sprt::format_double(cfg.alpha, 6) << ", grid "
            << cfg.grid_points << " cells\n";
  std::cout << "  mass_residual " << sprt::format_double(table.mass_residual, 6)
            << ", tail_error_bound "
            << sprt::format_double(table.tail_error_bound, 6) << "\n";
  print_table_summary(table);

  nlohmann::ordered_json meta = run_meta(cfg, elapsed);
  meta["grid_points"] = cfg.grid_points;
  meta["steps_run"] = grid.steps_run;
  meta["alpha_hat"] = sprt::empirical_alpha(table);
  if (decided_mass(table) > 0.0)
    meta["decision_time"] = sprt::stats_json(sprt::decision_time_stats(table));
  write_outputs(table, cfg, with_curve, meta);
  return 0;
}

int run_verify(const ExperimentConfig& cfg, const std::string& table_path,
               const std::string& against_path, const std::string& out_path) {
  std::optional<EnsembleTable> mc;
  std::optional<EnsembleTable> oracle;

  if (!table_path.empty()) {
    EnsembleTable t = sprt::read_table(table_path);
    if (t.is_oracle())
      oracle = std::move(t);
    else
      mc = std::move(t);
    if (!against_path.empty()) {
      EnsembleTable o = sprt::read_table(against_path);
      if (!o.is_oracle() || oracle.has_value())
        throw std::invalid_argument(
            "--against expects an oracle table next to a Monte Carlo table");
      oracle = std::move(o);
    }
  } else {
    const sprt::TestConfig tc = cfg.test_config();
    std::cout << "verify: simulating " << cfg.trials
              << " trials per hypothesis, seed " << cfg.master_seed << "\n";
    mc = sprt::run_ensemble(tc, cfg.ensemble_options());
    if (cfg.oracle_enabled && cfg.noise == "gaussian") {
      sprt::OracleOptions oo;
      oo.grid_points = cfg.grid_points;
      oracle = sprt::oracle_tables(sprt::propagate(tc, oo));
    }
  }

  std::vector<std::pair<std::string, std::vector<sprt::CheckResult>>> sections;
  if (mc) sections.emplace_back("monte_carlo", sprt::verify_table_checks(*mc));
  if (oracle)
    sections.emplace_back("oracle", sprt::verify_table_checks(*oracle));
  if (mc && oracle)
    sections.emplace_back("cross_validation",
                          sprt::verify_pair_checks(*mc, *oracle));

  bool ok = true;
  nlohmann::ordered_json report;
  report["kind"] = "verification_report";
  report["schema_version"] = 1;
  auto jsections = nlohmann::ordered_json::array();
  for (const auto& [name, checks] : sections) {
    std::cout << "[" << name << "]\n";
    sprt::print_checks(std::cout, checks);
    ok = ok && sprt::all_gated_pass(checks);
    nlohmann::ordered_json s = sprt::checks_json(checks);
    s["name"] = name;
    jsections.push_back(std::move(s));
  }
  report["sections"] = std::move(jsections);
  report["all_gated_pass"] = ok;
  if (!out_path.empty()) {
    sprt::write_json_file(report, out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  std::cout << (ok ? "verification PASS" : "verification FAIL") << "\n";
  return ok ? 0 : 1;
}

int run_sweep(const ExperimentConfig& cfg, const std::string& out_path) {
  if (cfg.noise != "gaussian")
    throw std::invalid_argument("sweep drives the oracle: gaussian noise only");
  std::vector<std::pair<double, double>> grid = cfg.sweep;
  if (grid.empty()) grid = {{0.04, 0.1}, {0.01, 0.1}, {0.0025, 0.1}};

  std::vector<EnsembleTable> tables;
  auto jtables = nlohmann::ordered_json::array();
  for (const auto& [rho, alpha] : grid) {
    const sprt::TestConfig tc = sprt::TestConfig::from_alpha(
        rho, alpha, sprt::NoiseModel::gaussian(), cfg.max_steps);
    sprt::OracleOptions oo;
    oo.grid_points = cfg.grid_points;
    EnsembleTable t = sprt::oracle_tables(sprt::propagate(tc, oo));
    const sprt::KappaSeries ks = sprt::kappa_series(t);
    std::cout << "rho " << sprt::format_double(rho, 6) << ": alpha_hat "
              << sprt::format_double(sprt::empirical_alpha(t), 8)
              << ", boundary-ratio median "
              << sprt::format_double(ks.median, 8) << ", flatness "
              << sprt::format_double(ks.flatness, 6) << "\n";
    nlohmann::ordered_json jt;
    jt["rho"] = rho;
    jt["alpha"] = alpha;
    jt["alpha_hat"] = sprt::empirical_alpha(t);
    jt["kappa_median"] = ks.median;
    jt["kappa_flatness"] = ks.flatness;
    jt["horizon"] = t.horizon;
    jt["mass_residual"] = t.mass_residual;
    jtables.push_back(std::move(jt));
    tables.push_back(std::move(t));
  }

  const std::vector<sprt::SweepSeries> series = sprt::sweep_decay_series(tables);
  sprt::print_sweep(std::cout, series);
  bool ok = true;
  for (const auto& s : series) ok = ok && (!s.gated || s.decreasing);

  if (!out_path.empty()) {
    nlohmann::ordered_json j = sprt::sweep_json(series);
    j["tables"] = std::move(jtables);
    sprt::write_json_file(j, out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  std::cout << (ok ? "sweep PASS" : "sweep FAIL") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential probability ratio test: seeded ensembles, an exact "
               "density-propagation oracle, and information-metric "
               "verification"};
  app.set_version_flag("--version", std::string("sprtlab ") + kVersion);
  app.require_subcommand(1);

  FlagSet f_sim, f_ora, f_ver, f_swp;
  bool curve_sim = false, curve_ora = false;
  std::string table_path, against_path;

  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a seeded Monte Carlo ensemble and tabulate it");
  add_common(sim, f_sim);
  sim->add_flag("--curve", curve_sim, "Also write the information curve");

  CLI::App* ora = app.add_subcommand(
      "oracle", "Exact absorbed-mass tables by density propagation");
  add_common(ora, f_ora);
  ora->add_flag("--curve", curve_ora, "Also write the information curve");

  CLI::App* ver = app.add_subcommand(
      "verify", "Run the verification battery on tables or a fresh run");
  add_common(ver, f_ver);
  ver->add_option("--table", table_path, "Existing table data file");
  ver->add_option("--against", against_path,
                  "Oracle table to cross-validate --table with");

  CLI::App* swp = app.add_subcommand(
      "sweep", "Oracle rho sweep aggregating residual-decay evidence");
  add_common(swp, f_swp);
  std::string sweep_grid;
  swp->add_option("--sweep", sweep_grid,
                  "Sweep points as rho:alpha[, rho:alpha...]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return run_simulate(merge(sim, f_sim), curve_sim);
    if (ora->parsed()) return run_oracle(merge(ora, f_ora), curve_ora);
    if (ver->parsed()) {
      const ExperimentConfig cfg = merge(ver, f_ver);
      return run_verify(cfg, table_path, against_path, cfg.out);
    }
    ExperimentConfig cfg = merge(swp, f_swp);
    if (swp->count("--sweep")) sprt::apply_config_entry(cfg, "sweep", sweep_grid);
    return run_sweep(cfg, cfg.out);
  } catch (const sprt::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const sprt::numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const sprt::resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
