#pragma once

#include <string>

#include "fdrstab/metrics.hpp"
#include "fdrstab/simulation.hpp"
#include "fdrstab/stabilizer.hpp"

namespace fdrstab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BaseKind { SplitBH, Knockoff, DS };

enum class AggMode { None, Stab, Derand, Mds, Mbh };

// One method column of the experiment: a base procedure plus an aggregator.
// Parsed from "base+agg" strings such as "knockoff+stab:e_avg" or "ds+mds".
struct MethodSpec {
  BaseKind base = BaseKind::Knockoff;
  AggMode agg = AggMode::None;
  AggregationKind stab_kind = AggregationKind::EAvg;

  std::string label() const;
  static MethodSpec parse(const std::string& text);  // throws ConfigError
};

struct ExperimentRequest {
  ScenarioConfig scenario;
  std::vector<MethodSpec> methods;
  std::string output_dir;
  int threads = 0;  // 0 = auto (FDRSTAB_THREADS env, then hardware)
  double mbh_gamma = 0.5;
  double q_kn = -1.0;  // knockoff rb e-value level; <=0 means q/2

  // stability sweep only
  std::vector<int> m_sweep;
  int ensembles_per_m = 50;
};

struct ResultRow {
  std::string scenario_name;
  std::string method;
  int rep = 0;
  double fdp = 0.0;
  double power = 0.0;
  int n_selected = 0;
  double wall_ms = 0.0;  // written to timings.csv, not results.csv
  std::uint64_t master_seed = 0;
  std::uint64_t rep_seed = 0;
};

struct MethodSummary {
  std::string scenario_name;
  std::string method;
  StabilitySummary summary;
};

struct SimulateOutput {
  std::vector<ResultRow> rows;
  std::vector<MethodSummary> summaries;
};

// Runs scenario x methods over reps. Writes results.csv, summary.csv and
// timings.csv into output_dir when it is nonempty.
SimulateOutput run_simulate(const ExperimentRequest& request);

struct StabilityRow {
  std::string scenario_name;
  std::string method;
  int M = 0;
  StabilitySummary summary;
};

// Fixed-dataset M sweep: one dataset per scenario seed, ensembles_per_m
// independent ensembles at each M. Writes stability.csv when output_dir set.
std::vector<StabilityRow> run_stability(const ExperimentRequest& request);

struct SelectOptions {
  std::string x_csv;
  std::string y_csv;  // empty allowed with synthesize_response
  MethodSpec method;
  double q = 0.1;
  int M = 50;
  std::uint64_t seed = 1;
  double mbh_gamma = 0.5;
  double q_kn = -1.0;
  bool synthesize_response = false;
  int synth_s = 60;
  double synth_sd_num = 50.0;  // beta sd = synth_sd_num / sqrt(n)
};

struct SelectReport {
  std::vector<std::string> selected_names;
  SelectionSet selected;
  int s_bar = 0;
  Vector stab_evalues;  // zero-length for non-stab aggregators
  double q = 0.0;
  int M = 0;
  std::uint64_t seed = 0;
  std::string method;
  // populated only under --synthesize-response
  bool has_truth = false;
  SelectionMetrics truth_metrics;
};

SelectReport run_select(const SelectOptions& options);
SelectReport run_select(const Matrix& X, const Vector& y,
                        const std::vector<std::string>& feature_names,
                        const SelectOptions& options);

std::string render_select_report(const SelectReport& report);

// Flat key = value config file ('#' comments, comma-separated lists).
ExperimentRequest parse_config_file(const std::string& path);

std::string results_csv_text(const std::vector<ResultRow>& rows);
std::string summary_csv_text(const std::vector<MethodSummary>& summaries);
std::string stability_csv_text(const std::vector<StabilityRow>& rows);

int resolve_threads(int requested);

}  // namespace fdrstab
