#include "fdrstab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "fdrstab/csv.hpp"

namespace fdrstab {

namespace {

std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  std::uint64_t x = a;
  x ^= b + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
  x ^= c + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t base_tag(BaseKind base) {
  switch (base) {
    case BaseKind::SplitBH: return 0x5342ULL;
    case BaseKind::Knockoff: return 0x4b4eULL;
    case BaseKind::DS: return 0x4453ULL;
  }
  return 0;
}

const char* base_name(BaseKind base) {
  switch (base) {
    case BaseKind::SplitBH: return "splitbh";
    case BaseKind::Knockoff: return "knockoff";
    case BaseKind::DS: return "ds";
  }
  return "?";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Index-sharded parallel loop; every worker touches disjoint result slots so
// output does not depend on the schedule.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

BaseProcedure make_base(BaseKind base, const Matrix* sigma, double q_kn) {
  switch (base) {
    case BaseKind::SplitBH:
      return [](const Matrix& X, const Vector& y, double q, RngStream& rng) {
        return splitbh_run(X, y, q, rng);
      };
    case BaseKind::Knockoff:
      return [sigma, q_kn](const Matrix& X, const Vector& y, double q,
                           RngStream& rng) {
        return knockoff_run(X, y, *sigma, q, rng, q_kn);
      };
    case BaseKind::DS:
      return [](const Matrix& X, const Vector& y, double q, RngStream& rng) {
        return ds_run(X, y, q, rng);
      };
  }
  throw std::logic_error("make_base: unknown base");
}

SelectionSet select_with(const MethodSpec& method, const Ensemble& ensemble,
                         double q, double mbh_gamma) {
  switch (method.agg) {
    case AggMode::None:
      return ensemble.runs.front().selected;
    case AggMode::Stab:
      return stabilizer_select(ensemble, method.stab_kind);
    case AggMode::Derand: {
      std::vector<Vector> rb;
      for (const auto& run : ensemble.runs) rb.push_back(*run.rb_evalues);
      return derand_select(rb, q);
    }
    case AggMode::Mds:
      return mds_select(ensemble, q);
    case AggMode::Mbh: {
      Matrix pvals(ensemble.runs.size(), ensemble.p);
      for (std::size_t m = 0; m < ensemble.runs.size(); ++m)
        pvals.row(m) = -ensemble.runs[m].stats;  // splitbh stores T = -P
      return mbh_select(pvals, q, mbh_gamma);
    }
  }
  throw std::logic_error("select_with: unknown aggregator");
}

// Shrinks the empirical covariance toward the identity until it is usable as
// a knockoff construction target.
Matrix estimate_covariance(const Matrix& X) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  Matrix centered = X.rowwise() - X.colwise().mean();
  for (int j = 0; j < p; ++j) {
    double sd = std::sqrt(centered.col(j).squaredNorm() / n);
    if (sd > 0.0) centered.col(j) /= sd;
  }
  Matrix sigma = centered.transpose() * centered / n;
  for (double alpha : {0.0, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8}) {
    Matrix shrunk = (1.0 - alpha) * sigma + alpha * Matrix::Identity(p, p);
    Eigen::LLT<Matrix> llt(shrunk - 1e-4 * Matrix::Identity(p, p));
    if (llt.info() == Eigen::Success) return shrunk;
  }
  return 0.1 * sigma + 0.9 * Matrix::Identity(p, p);
}

}  // namespace

std::string MethodSpec::label() const {
  std::string s = base_name(base);
  switch (agg) {
    case AggMode::None: return s + "+none";
    case AggMode::Stab: return s + "+stab:" + aggregation_name(stab_kind);
    case AggMode::Derand: return s + "+derand";
    case AggMode::Mds: return s + "+mds";
    case AggMode::Mbh: return s + "+mbh";
  }
  return s;
}

MethodSpec MethodSpec::parse(const std::string& text) {
  auto plus = text.find('+');
  if (plus == std::string::npos)
    throw ConfigError("method '" + text + "': expected base+aggregator");
  std::string base_str = text.substr(0, plus);
  std::string agg_str = text.substr(plus + 1);

  MethodSpec m;
  if (base_str == "splitbh") m.base = BaseKind::SplitBH;
  else if (base_str == "knockoff") m.base = BaseKind::Knockoff;
  else if (base_str == "ds") m.base = BaseKind::DS;
  else throw ConfigError("unknown base procedure '" + base_str + "'");

  if (agg_str == "none") {
    m.agg = AggMode::None;
  } else if (agg_str.rfind("stab:", 0) == 0) {
    m.agg = AggMode::Stab;
    std::string kind = agg_str.substr(5);
    if (kind == "mean") m.stab_kind = AggregationKind::Mean;
    else if (kind == "median") m.stab_kind = AggregationKind::Median;
    else if (kind == "rank_mean") m.stab_kind = AggregationKind::RankMean;
    else if (kind == "sel_prob") m.stab_kind = AggregationKind::SelProb;
    else if (kind == "e_avg") m.stab_kind = AggregationKind::EAvg;
    else throw ConfigError("unknown aggregation kind '" + kind + "'");
  } else if (agg_str == "derand") {
    m.agg = AggMode::Derand;
    if (m.base != BaseKind::Knockoff)
      throw ConfigError("derand requires the knockoff base");
  } else if (agg_str == "mds") {
    m.agg = AggMode::Mds;
    if (m.base != BaseKind::DS) throw ConfigError("mds requires the ds base");
  } else if (agg_str == "mbh") {
    m.agg = AggMode::Mbh;
    if (m.base != BaseKind::SplitBH)
      throw ConfigError("mbh requires the splitbh base");
  } else {
    throw ConfigError("unknown aggregator '" + agg_str + "'");
  }
  return m;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FDRSTAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SimulateOutput run_simulate(const ExperimentRequest& request) {
  const ScenarioConfig& sc = request.scenario;
  if (request.methods.empty())
    throw ConfigError("run_simulate: no methods requested");

  Matrix sigma = materialize_covariance(sc.covariance, sc.p);
  Matrix sigma_chol = cholesky(sigma);

  // Which bases are needed, and whether any aggregator needs a full ensemble.
  std::map<BaseKind, int> ensemble_size;
  for (const auto& m : request.methods) {
    int need = (m.agg == AggMode::None) ? 1 : sc.M;
    auto [it, inserted] = ensemble_size.try_emplace(m.base, need);
    if (!inserted) it->second = std::max(it->second, need);
  }

  const int n_methods = static_cast<int>(request.methods.size());
  std::vector<ResultRow> rows(static_cast<std::size_t>(sc.reps) * n_methods);
  std::vector<std::vector<SelectionSet>> sets(
      n_methods, std::vector<SelectionSet>(sc.reps));

  int threads = resolve_threads(request.threads);
  parallel_for(sc.reps, threads, [&](int rep) {
    GeneratedDataset data = gen_dataset(sc, rep, &sigma_chol);

    std::map<BaseKind, Ensemble> ensembles;
    for (auto [base, M] : ensemble_size) {
      std::uint64_t seed = mix64(sc.master_seed, rep, base_tag(base));
      BaseProcedure proc = make_base(base, &sigma, request.q_kn);
      ensembles.emplace(base,
                        run_ensemble(proc, data.X, data.y, sc.q, M, seed));
    }

    for (int mi = 0; mi < n_methods; ++mi) {
      const MethodSpec& method = request.methods[mi];
      const Ensemble& ens = ensembles.at(method.base);
      auto t0 = std::chrono::steady_clock::now();
      SelectionSet sel = select_with(method, ens, sc.q, request.mbh_gamma);
      auto t1 = std::chrono::steady_clock::now();
      SelectionMetrics metrics = selection_metrics(sel, data.true_support);

      ResultRow& row = rows[static_cast<std::size_t>(rep) * n_methods + mi];
      row.scenario_name = sc.name;
      row.method = method.label();
      row.rep = rep;
      row.fdp = metrics.fdp;
      row.power = metrics.power;
      row.n_selected = metrics.n_selected;
      row.wall_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      row.master_seed = sc.master_seed;
      row.rep_seed = mix64(sc.master_seed, rep, base_tag(method.base));
      sets[mi][rep] = std::move(sel);
    }
  });

  SimulateOutput out;
  out.rows = std::move(rows);
  for (int mi = 0; mi < n_methods; ++mi) {
    std::vector<SelectionMetrics> records;
    for (int rep = 0; rep < sc.reps; ++rep) {
      const ResultRow& r = out.rows[static_cast<std::size_t>(rep) * n_methods + mi];
      records.push_back({r.fdp, r.power, r.n_selected});
    }
    MethodSummary ms;
    ms.scenario_name = sc.name;
    ms.method = request.methods[mi].label();
    ms.summary = summarize(records, sets[mi]);
    out.summaries.push_back(std::move(ms));
  }

  if (!request.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(request.output_dir);
    std::ofstream(fs::path(request.output_dir) / "results.csv")
        << results_csv_text(out.rows);
    std::ofstream(fs::path(request.output_dir) / "summary.csv")
        << summary_csv_text(out.summaries);
    std::ofstream timings(fs::path(request.output_dir) / "timings.csv");
    timings << "scenario,method,rep,wall_ms\n";
    for (const auto& r : out.rows) {
      timings << r.scenario_name << ',' << r.method << ',' << r.rep << ','
              << fmt(r.wall_ms) << '\n';
    }
  }
  return out;
}

std::vector<StabilityRow> run_stability(const ExperimentRequest& request) {
  const ScenarioConfig& sc = request.scenario;
  if (request.m_sweep.empty())
    throw ConfigError("run_stability: empty M sweep");
  if (request.methods.empty())
    throw ConfigError("run_stability: no methods requested");

  Matrix sigma = materialize_covariance(sc.covariance, sc.p);
  Matrix sigma_chol = cholesky(sigma);
  GeneratedDataset data = gen_dataset(sc, 0, &sigma_chol);

  int threads = resolve_threads(request.threads);
  std::vector<StabilityRow> out;
  for (int M : request.m_sweep) {
    const int E = request.ensembles_per_m;
    std::vector<std::vector<SelectionSet>> sets(
        request.methods.size(), std::vector<SelectionSet>(E));
    std::vector<std::vector<SelectionMetrics>> recs(
        request.methods.size(), std::vector<SelectionMetrics>(E));

    std::map<BaseKind, int> runs_for;
    for (const auto& m : request.methods) {
      int need = m.agg == AggMode::None ? 1 : M;
      auto [it, inserted] = runs_for.try_emplace(m.base, need);
      if (!inserted) it->second = std::max(it->second, need);
    }

    parallel_for(E, threads, [&](int e) {
      std::map<BaseKind, Ensemble> ensembles;
      for (std::size_t mi = 0; mi < request.methods.size(); ++mi) {
        BaseKind base = request.methods[mi].base;
        if (!ensembles.count(base)) {
          std::uint64_t seed = mix64(sc.master_seed, mix64(M, e), base_tag(base));
          BaseProcedure proc = make_base(base, &sigma, request.q_kn);
          ensembles.emplace(base, run_ensemble(proc, data.X, data.y, sc.q,
                                               runs_for.at(base), seed));
        }
        SelectionSet sel = select_with(request.methods[mi], ensembles.at(base),
                                       sc.q, request.mbh_gamma);
        recs[mi][e] = selection_metrics(sel, data.true_support);
        sets[mi][e] = std::move(sel);
      }
    });

    for (std::size_t mi = 0; mi < request.methods.size(); ++mi) {
      StabilityRow row;
      row.scenario_name = sc.name;
      row.method = request.methods[mi].label();
      row.M = M;
      row.summary = summarize(recs[mi], sets[mi]);
      out.push_back(std::move(row));
    }
  }

  if (!request.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(request.output_dir);
    std::ofstream(fs::path(request.output_dir) / "stability.csv")
        << stability_csv_text(out);
  }
  return out;
}

SelectReport run_select(const Matrix& X, const Vector& y_in,
                        const std::vector<std::string>& feature_names,
                        const SelectOptions& options) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());

  Vector y = y_in;
  SelectionSet truth;
  bool has_truth = false;
  if (options.synthesize_response) {
    RngStream rng(options.seed, 0x73796e7468ULL);
    std::vector<int> pool(p);
    for (int i = 0; i < p; ++i) pool[i] = i;
    for (int k = 0; k < options.synth_s; ++k) {
      int j = k + static_cast<int>(rng.uniform_below(p - k));
      std::swap(pool[k], pool[j]);
    }
    std::vector<int> support(pool.begin(), pool.begin() + options.synth_s);
    truth = SelectionSet(support, p);
    Vector beta = Vector::Zero(p);
    double sd = options.synth_sd_num / std::sqrt(static_cast<double>(n));
    for (int i : truth.indices) beta(i) = sd * rng.normal();
    y = X * beta;
    for (int i = 0; i < n; ++i) y(i) += rng.normal();
    has_truth = true;
  } else if (y.size() != n) {
    throw DimensionMismatch("y has " + std::to_string(y.size()) +
                            " rows, X has " + std::to_string(n));
  }

  Matrix sigma;
  if (options.method.base == BaseKind::Knockoff) sigma = estimate_covariance(X);
  BaseProcedure proc = make_base(options.method.base, &sigma, options.q_kn);
  int runs = options.method.agg == AggMode::None ? 1 : options.M;
  Ensemble ens = run_ensemble(proc, X, y, options.q, runs, options.seed);

  SelectReport report;
  report.selected =
      select_with(options.method, ens, options.q, options.mbh_gamma);
  report.s_bar = ens.s_bar;
  report.q = options.q;
  report.M = runs;
  report.seed = options.seed;
  report.method = options.method.label();
  if (options.method.agg == AggMode::Stab) {
    AggregatedScores scores = aggregate(ens, options.method.stab_kind);
    report.stab_evalues = stab_evalues(scores, ens.s_bar, ens.q, ens.p);
  }
  for (int i : report.selected.indices) {
    report.selected_names.push_back(
        i < static_cast<int>(feature_names.size()) ? feature_names[i]
                                                   : "x" + std::to_string(i + 1));
  }
  if (has_truth) {
    report.has_truth = true;
    report.truth_metrics = selection_metrics(report.selected, truth);
  }
  return report;
}

SelectReport run_select(const SelectOptions& options) {
  CsvTable x_table = read_csv_matrix(options.x_csv);
  Vector y;
  if (!options.synthesize_response) {
    y = read_csv_column(options.y_csv);
    if (y.size() != x_table.values.rows()) {
      throw DimensionMismatch(
          "y has " + std::to_string(y.size()) + " rows, X has " +
          std::to_string(x_table.values.rows()));
    }
  }
  return run_select(x_table.values, y, x_table.header, options);
}

std::string render_select_report(const SelectReport& report) {
  std::ostringstream out;
  out << "method: " << report.method << '\n';
  out << "q: " << fmt(report.q) << '\n';
  out << "M: " << report.M << '\n';
  out << "seed: " << report.seed << '\n';
  out << "s_bar: " << report.s_bar << '\n';
  out << "n_selected: " << report.selected.size() << '\n';
  if (report.stab_evalues.size() > 0) {
    double nonzero = 0.0;
    for (int i = 0; i < report.stab_evalues.size(); ++i)
      nonzero = std::max(nonzero, report.stab_evalues(i));
    out << "stab_evalue: " << fmt(nonzero) << '\n';
  }
  if (report.has_truth) {
    out << "fdp: " << fmt(report.truth_metrics.fdp) << '\n';
    out << "power: " << fmt(report.truth_metrics.power) << '\n';
  }
  out << "selected:\n";
  for (const auto& name : report.selected_names) out << name << '\n';
  return out.str();
}

std::string results_csv_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "scenario,method,rep,fdp,power,n_selected,master_seed,rep_seed\n";
  for (const auto& r : rows) {
    out << r.scenario_name << ',' << r.method << ',' << r.rep << ','
        << fmt(r.fdp) << ',' << fmt(r.power) << ',' << r.n_selected << ','
        << r.master_seed << ',' << r.rep_seed << '\n';
  }
  return out.str();
}

std::string summary_csv_text(const std::vector<MethodSummary>& summaries) {
  std::ostringstream out;
  out << "scenario,method,mean_fdp,var_fdp,mean_power,var_power,"
         "mean_n_selected,var_n_selected,mean_pairwise_jaccard\n";
  for (const auto& s : summaries) {
    out << s.scenario_name << ',' << s.method << ',' << fmt(s.summary.mean_fdp)
        << ',' << fmt(s.summary.var_fdp) << ',' << fmt(s.summary.mean_power)
        << ',' << fmt(s.summary.var_power) << ','
        << fmt(s.summary.mean_n_selected) << ','
        << fmt(s.summary.var_n_selected) << ','
        << fmt(s.summary.mean_pairwise_jaccard) << '\n';
  }
  return out.str();
}

std::string stability_csv_text(const std::vector<StabilityRow>& rows) {
  std::ostringstream out;
  out << "scenario,method,M,mean_fdp,var_fdp,mean_power,var_power,"
         "mean_n_selected,var_n_selected,mean_pairwise_jaccard\n";
  for (const auto& r : rows) {
    out << r.scenario_name << ',' << r.method << ',' << r.M << ','
        << fmt(r.summary.mean_fdp) << ',' << fmt(r.summary.var_fdp) << ','
        << fmt(r.summary.mean_power) << ',' << fmt(r.summary.var_power) << ','
        << fmt(r.summary.mean_n_selected) << ','
        << fmt(r.summary.var_n_selected) << ','
        << fmt(r.summary.mean_pairwise_jaccard) << '\n';
  }
  return out.str();
}

ExperimentRequest parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");

  ExperimentRequest req;
  ScenarioConfig& sc = req.scenario;
  sc.name = "custom";
  bool preset = false;

  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        fail("expected 'key = value'");
      continue;
    }
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      std::size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");

    auto parse_int = [&](const std::string& v) {
      try {
        return std::stoll(v);
      } catch (const std::exception&) {
        fail("field '" + key + "': not an integer: '" + v + "'");
        return 0LL;
      }
    };
    auto parse_real = [&](const std::string& v) {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        fail("field '" + key + "': not a number: '" + v + "'");
        return 0.0;
      }
    };
    auto split_list = [&](const std::string& v) {
      std::vector<std::string> parts;
      std::stringstream ss(v);
      std::string part;
      while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (!part.empty()) parts.push_back(part);
      }
      return parts;
    };

    if (key == "scenario") {
      if (value == "toy") {
        auto keep_reps = sc.reps;
        auto keep_seed = sc.master_seed;
        sc = toy_scenario();
        sc.reps = keep_reps;
        sc.master_seed = keep_seed;
        preset = true;
      } else {
        bool found = false;
        for (const auto& g : paper_grid()) {
          if (g.name == value) {
            auto keep_reps = sc.reps;
            auto keep_seed = sc.master_seed;
            sc = g;
            sc.reps = keep_reps;
            sc.master_seed = keep_seed;
            preset = true;
            found = true;
            break;
          }
        }
        if (!found) fail("unknown scenario preset '" + value + "'");
      }
    } else if (key == "name") {
      sc.name = value;
    } else if (key == "n") {
      sc.n = static_cast<int>(parse_int(value));
    } else if (key == "p") {
      sc.p = static_cast<int>(parse_int(value));
    } else if (key == "s") {
      sc.s = static_cast<int>(parse_int(value));
    } else if (key == "signal") {
      auto parts = split_list(value);
      std::stringstream ss(value);
      std::string kind;
      std::getline(ss, kind, ':');
      kind = trim(kind);
      if (kind == "gaussian") {
        std::string d;
        if (!std::getline(ss, d)) fail("signal gaussian needs :delta");
        sc.signal = SignalLaw::gaussian_scaled(parse_real(trim(d)));
      } else if (kind == "uniform") {
        std::string lo, hi;
        if (!std::getline(ss, lo, ':') || !std::getline(ss, hi))
          fail("signal uniform needs :lo:hi");
        sc.signal = SignalLaw::uniform_two_sided(parse_real(trim(lo)),
                                                 parse_real(trim(hi)));
      } else {
        fail("unknown signal law '" + kind + "'");
      }
    } else if (key == "covariance") {
      std::stringstream ss(value);
      std::string kind;
      std::getline(ss, kind, ':');
      kind = trim(kind);
      if (kind == "identity") {
        sc.covariance = CovarianceSpec::identity();
      } else if (kind == "cs") {
        std::string rho;
        if (!std::getline(ss, rho)) fail("covariance cs needs :rho");
        sc.covariance = CovarianceSpec::compound_symmetry(parse_real(trim(rho)));
      } else if (kind == "toeplitz") {
        std::string rho, bs;
        if (!std::getline(ss, rho, ':')) fail("covariance toeplitz needs :rho");
        int block = 50;
        if (std::getline(ss, bs)) block = static_cast<int>(parse_int(trim(bs)));
        sc.covariance =
            CovarianceSpec::block_toeplitz(parse_real(trim(rho)), block);
      } else {
        fail("unknown covariance kind '" + kind + "'");
      }
    } else if (key == "q") {
      sc.q = parse_real(value);
    } else if (key == "M") {
      sc.M = static_cast<int>(parse_int(value));
    } else if (key == "reps") {
      sc.reps = static_cast<int>(parse_int(value));
    } else if (key == "seed") {
      sc.master_seed = static_cast<std::uint64_t>(parse_int(value));
    } else if (key == "methods") {
      for (const auto& m : split_list(value)) {
        try {
          req.methods.push_back(MethodSpec::parse(m));
        } catch (const ConfigError& e) {
          fail(e.what());
        }
      }
    } else if (key == "output_dir") {
      req.output_dir = value;
    } else if (key == "threads") {
      req.threads = value == "auto" ? 0 : static_cast<int>(parse_int(value));
    } else if (key == "mbh_gamma") {
      req.mbh_gamma = parse_real(value);
    } else if (key == "q_kn") {
      req.q_kn = parse_real(value);
    } else if (key == "m_sweep") {
      for (const auto& m : split_list(value))
        req.m_sweep.push_back(static_cast<int>(parse_int(m)));
    } else if (key == "ensembles_per_m") {
      req.ensembles_per_m = static_cast<int>(parse_int(value));
    } else {
      fail("unknown key '" + key + "'");
    }
  }

  if (req.methods.empty())
    throw ConfigError(path + ": no methods specified");
  if (!preset && (sc.n <= 0 || sc.p <= 0))
    throw ConfigError(path + ": scenario dimensions missing (n, p)");
  if (sc.q <= 0.0 || sc.q >= 1.0)
    throw ConfigError(path + ": q must be in (0,1)");
  return req;
}

}  // namespace fdrstab
