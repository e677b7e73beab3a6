#include <CLI11.hpp>
#include <iostream>

#include "fdrstab/csv.hpp"
#include "fdrstab/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDimension = 4;

int do_simulate(const std::string& config_path, int threads) {
  fdrstab::ExperimentRequest req;
  try {
    req = fdrstab::parse_config_file(config_path);
  } catch (const fdrstab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (threads > 0) req.threads = threads;
  if (req.output_dir.empty()) req.output_dir = ".";
  try {
    auto out = fdrstab::run_simulate(req);
    std::cerr << "wrote " << out.rows.size() << " result rows to "
              << req.output_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}

int do_stability(const std::string& config_path, int threads) {
  fdrstab::ExperimentRequest req;
  try {
    req = fdrstab::parse_config_file(config_path);
    if (req.m_sweep.empty())
      throw fdrstab::ConfigError(config_path + ": m_sweep is required");
  } catch (const fdrstab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (threads > 0) req.threads = threads;
  if (req.output_dir.empty()) req.output_dir = ".";
  try {
    auto rows = fdrstab::run_stability(req);
    std::cerr << "wrote " << rows.size() << " stability rows to "
              << req.output_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}

int do_select(const fdrstab::SelectOptions& options) {
  try {
    auto report = fdrstab::run_select(options);
    std::cout << fdrstab::render_select_report(report);
  } catch (const fdrstab::CsvParseError& e) {
    std::cerr << "csv error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fdrstab::DimensionMismatch& e) {
    std::cerr << "dimension mismatch: " << e.what() << '\n';
    return kExitDimension;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized FDR-controlled variable selection"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;

  auto* simulate = app.add_subcommand(
      "simulate", "Run a Monte Carlo scenario and write results/summary CSVs");
  simulate->add_option("--config", config_path, "flat key = value config file")
      ->required();
  simulate->add_option("--threads", threads, "worker threads (default auto)");

  auto* stability = app.add_subcommand(
      "stability", "Fixed-dataset M sweep, write stability.csv");
  stability->add_option("--config", config_path, "flat key = value config file")
      ->required();
  stability->add_option("--threads", threads, "worker threads (default auto)");

  fdrstab::SelectOptions sel;
  std::string base_str = "ds";
  std::string agg_str = "stab:e_avg";
  auto* select = app.add_subcommand(
      "select", "Apply a method to a user-supplied CSV dataset");
  select->add_option("--x", sel.x_csv, "design matrix CSV with header row")
      ->required();
  select->add_option("--y", sel.y_csv, "response CSV, single column");
  select->add_option("--base", base_str, "base procedure: splitbh|knockoff|ds");
  select->add_option("--agg", agg_str,
                     "aggregator: none|stab:<kind>|derand|mds|mbh");
  select->add_option("--q", sel.q, "target FDR level");
  select->add_option("--M", sel.M, "number of base runs");
  select->add_option("--seed", sel.seed, "master seed");
  select->add_option("--q-kn", sel.q_kn, "knockoff rb e-value level");
  select->add_option("--mbh-gamma", sel.mbh_gamma, "MBH quantile gamma");
  select->add_flag("--synthesize-response", sel.synthesize_response,
                   "generate y from a sparse linear model on X");
  select->add_option("--synth-s", sel.synth_s, "synthetic signal count");
  select->add_option("--synth-sd-num", sel.synth_sd_num,
                     "synthetic beta sd numerator (sd = num/sqrt(n))");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return do_simulate(config_path, threads);
  if (stability->parsed()) return do_stability(config_path, threads);
  if (select->parsed()) {
    try {
      sel.method = fdrstab::MethodSpec::parse(base_str + "+" + agg_str);
    } catch (const fdrstab::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    if (!sel.synthesize_response && sel.y_csv.empty()) {
      std::cerr << "config error: --y is required unless "
                   "--synthesize-response is given\n";
      return kExitConfig;
    }
    return do_select(sel);
  }
  return 0;
}
