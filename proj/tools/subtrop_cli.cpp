// Command-line front end: synth, factorize, reconstruct, evaluate, predict,
// experiment and the hidden selftest.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "subtrop/csv.hpp"
#include "subtrop/error.hpp"
#include "subtrop/eval.hpp"
#include "subtrop/experiment.hpp"
#include "subtrop/factorize.hpp"
#include "subtrop/objective.hpp"
#include "subtrop/oracle.hpp"
#include "subtrop/polymin.hpp"
#include "subtrop/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace subtrop;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool quiet = false;
};

void note(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  SynthSpec spec;
  std::string noise = "none";
  double level = 0.0;
  std::string out = ".";
};

int cmd_synth(const SynthArgs& a, const Globals& g) {
  SynthSpec spec = a.spec;
  spec.noise.kind = noise_kind_from_name(a.noise);
  spec.noise.level = a.level;
  spec.seed = g.seed;
  if (spec.noise.kind == NoiseKind::kNone && a.level != 0.0) {
    throw UsageError("--level needs --noise");
  }
  const SynthInstance inst = generate_instance(spec);
  for (const auto& w : inst.warnings) note(g, "warning: " + w);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_csv(dir / "clean.csv", inst.clean);
  write_csv(dir / "noisy.csv", inst.noisy);
  write_csv(dir / "B.csv", inst.true_B);
  write_csv(dir / "C.csv", inst.true_C);

  json m;
  m["command"] = "synth";
  m["rows"] = spec.rows;
  m["cols"] = spec.cols;
  m["rank"] = spec.rank;
  m["density"] = spec.density;
  m["noise"] = std::string(noise_kind_name(spec.noise.kind));
  m["level"] = spec.noise.level;
  m["integer_levels"] = spec.integer_levels;
  m["seed"] = spec.seed;
  m["factor_seed"] = derive_seed(spec.seed, 0);
  m["noise_seed"] = derive_seed(spec.seed, 1);
  m["flip_replacement"] = "unconditional";
  m["noise_floor"] = nullptr;
  if (nnz(inst.clean) > 0) {
    m["noise_floor"] = relative_frobenius(inst.clean, inst.noisy);
  }
  m["warnings"] = inst.warnings;
  m["files"] = {"clean.csv", "noisy.csv", "B.csv", "C.csv"};
  write_json(dir / "manifest.json", m);
  note(g, "wrote " + dir.string());
  return kOk;
}

// ------------------------------------------------------- factorize/predict

struct AlgoArgs {
  std::string algorithm = "capricorn";
  std::size_t rank = 5;
  std::optional<std::size_t> cycles;
  std::optional<std::string> objective;
  CapricornParams capricorn;
  CancerParams cancer;
  bool no_rescale = false;
};

void add_algo_options(CLI::App* sub, AlgoArgs& a) {
  sub->add_option("--algorithm,-a", a.algorithm, "capricorn or cancer")
      ->check(CLI::IsMember({"capricorn", "cancer"}));
  sub->add_option("--rank,-k", a.rank, "number of blocks")->check(CLI::PositiveNumber);
  sub->add_option("--cycles,-M", a.cycles,
                  "passes over all blocks (default 4 capricorn, 14 cancer)");
  sub->add_option("--objective", a.objective, "frobenius, l1 or js")
      ->check(CLI::IsMember({"frobenius", "l1", "js", "jensen-shannon"}));
  sub->add_option("--bucket-size", a.capricorn.bucket_size, "capricorn bucketSize")
      ->capture_default_str();
  sub->add_option("--delta", a.capricorn.delta, "capricorn bucket width")
      ->capture_default_str();
  sub->add_option("--theta", a.capricorn.theta, "capricorn expansion threshold")
      ->capture_default_str();
  sub->add_option("--tau", a.capricorn.tau, "capricorn correlation slack")
      ->capture_default_str();
  sub->add_option("--max-degree", a.cancer.max_degree, "cancer t")
      ->capture_default_str();
  sub->add_option("--update-fraction", a.cancer.update_fraction, "cancer f")
      ->capture_default_str();
  sub->add_flag("--random-abscissae", a.cancer.random_abscissae,
                "cancer: random sample points instead of equispaced");
  sub->add_flag("--no-rescale", a.no_rescale,
                "cancer: do not divide the data by its maximum");
}

FactorizeOptions to_options(const AlgoArgs& a, const Globals& g) {
  FactorizeOptions o;
  o.algorithm = algorithm_from_name(a.algorithm);
  o.rank = a.rank;
  o.cycles = a.cycles;
  o.objective = a.objective;
  o.capricorn = a.capricorn;
  o.capricorn.validate();
  o.cancer = a.cancer;
  o.cancer.seed = g.seed;
  o.cancer.validate();
  o.rescale = !a.no_rescale;
  return o;
}

json params_json(const FactorizeOptions& o, std::size_t cycles,
                 const std::string& objective) {
  json p;
  p["algorithm"] = std::string(algorithm_name(o.algorithm));
  p["rank"] = o.rank;
  p["cycles"] = cycles;
  p["objective"] = objective;
  if (o.algorithm == Algorithm::kCapricorn) {
    p["bucket_size"] = o.capricorn.bucket_size;
    p["delta"] = o.capricorn.delta;
    p["theta"] = o.capricorn.theta;
    p["tau"] = o.capricorn.tau;
  } else {
    p["max_degree"] = o.cancer.max_degree;
    p["update_fraction"] = o.cancer.update_fraction;
    p["random_abscissae"] = o.cancer.random_abscissae;
    p["rescale"] = o.rescale;
  }
  return p;
}

struct FactorizeArgs {
  AlgoArgs algo;
  std::string input;
  bool skip_header = false;
  std::string out = ".";
};

int cmd_factorize(const FactorizeArgs& a, const Globals& g) {
  const NonNegMatrix A = read_csv(a.input, a.skip_header);
  const FactorizeOptions o = to_options(a.algo, g);
  const FactorizeResult r = factorize(A, o);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_csv(dir / "B.csv", r.factors.B);
  write_csv(dir / "C.csv", r.factors.C);
  {
    std::ostringstream t;
    r.trace.write_csv(t);
    write_text(dir / "trace.csv", t.str());
  }
  std::size_t failed = 0;
  for (const auto& rec : r.trace.records) failed += rec.failed;

  json s;
  s["input"] = a.input;
  s["rows"] = A.rows();
  s["cols"] = A.cols();
  s["observed"] = A.observed_count();
  s["params"] = params_json(o, r.cycles, r.factors.objective_name);
  s["seed"] = g.seed;
  s["scale"] = r.factors.scale;
  s["best_error"] = r.best_error;
  s["final_error"] = r.final_error;
  s["relative_error"] = r.relative_error;
  s["iterations"] = r.trace.records.size() - 1;
  s["failed_updates"] = failed;
  s["sparsity_B"] = sparsity(r.factors.B);
  s["sparsity_C"] = sparsity(r.factors.C);
  s["wall_seconds"] = r.seconds;
  write_json(dir / "summary.json", s);
  note(g, "best error " + format_double(r.best_error) + ", relative " +
              format_double(r.relative_error) + " (" +
              std::to_string(r.seconds) + " s)");
  return kOk;
}

// ---------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string b, c, out;
};

int cmd_reconstruct(const ReconstructArgs& a, const Globals&) {
  const NonNegMatrix R = maxtimes_product(read_csv(a.b), read_csv(a.c));
  if (a.out.empty() || a.out == "-") {
    write_csv(std::cout, R);
  } else {
    write_csv(fs::path(a.out), R);
  }
  return kOk;
}

// ------------------------------------------------------------- evaluate

json report_json(const PredictionReport& r, const std::vector<std::string>& metrics) {
  json j;
  j["evaluated"] = r.evaluated;
  j["evaluated_nonzero"] = r.evaluated_nonzero;
  for (const auto& m : metrics) j[m] = metric_value(r, m);
  auto rows = [](const RowAverage& v) {
    return json{{"rows_used", v.rows_used}, {"rows_skipped", v.rows_skipped}};
  };
  j["rank_rows"] = {{"spearman_rho", rows(r.spearman)},
                    {"kendall_tau", rows(r.kendall)},
                    {"mrr", rows(r.mrr)}};
  return j;
}

std::vector<std::string> parse_metrics(const std::string& list) {
  if (list.empty() || list == "all") return all_metric_names();
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string m;
  while (std::getline(ss, m, ',')) {
    const auto& names = all_metric_names();
    if (std::find(names.begin(), names.end(), m) == names.end()) {
      throw UsageError("unknown metric '" + m + "'");
    }
    out.push_back(m);
  }
  return out;
}

struct EvaluateArgs {
  std::string truth, pred, b, c, holdout, metrics = "all", json_out, csv_out;
};

int cmd_evaluate(const EvaluateArgs& a, const Globals&) {
  const std::vector<std::string> metrics = parse_metrics(a.metrics);
  if (a.pred.empty() == (a.b.empty() || a.c.empty())) {
    throw UsageError("give either --pred or both --B and --C");
  }
  const NonNegMatrix truth = read_csv(a.truth);
  const NonNegMatrix pred =
      a.pred.empty() ? maxtimes_product(read_csv(a.b), read_csv(a.c))
                     : read_csv(a.pred);
  PatternMatrix holdout(truth.rows(), truth.cols());
  if (a.holdout.empty()) {
    for (std::size_t i = 0; i < truth.rows(); ++i) {
      for (std::size_t j = 0; j < truth.cols(); ++j) {
        holdout.set(i, j, truth.is_observed(i, j));
      }
    }
  } else {
    holdout = pattern_from_matrix(read_csv(a.holdout));
  }
  if (holdout.rows() != truth.rows() || holdout.cols() != truth.cols() ||
      pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw DataError("truth, prediction and holdout shapes differ");
  }
  const PredictionReport rep = evaluate_prediction(truth, pred, holdout);
  const json j = report_json(rep, metrics);
  if (!a.json_out.empty()) write_json(a.json_out, j);
  if (!a.csv_out.empty()) {
    std::ostringstream o;
    o << "metric,value\n";
    for (const auto& m : metrics) {
      const double v = metric_value(rep, m);
      o << m << ',' << (std::isnan(v) ? "NaN" : format_double(v)) << '\n';
    }
    write_text(a.csv_out, o.str());
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

// -------------------------------------------------------------- predict

struct PredictArgs {
  AlgoArgs algo;
  std::string input;
  bool skip_header = false;
  std::optional<double> fraction;
  std::optional<std::size_t> per_row;
  bool all_entries = false;
  std::size_t repetitions = 1;
  std::string out = ".";
};

int cmd_predict(const PredictArgs& a, const Globals& g) {
  if (a.fraction.has_value() == a.per_row.has_value()) {
    throw UsageError("give exactly one of --holdout-fraction or --per-row");
  }
  if (a.repetitions == 0) throw UsageError("--repetitions must be >= 1");
  const NonNegMatrix A = read_csv(a.input, a.skip_header);
  const FactorizeOptions o = to_options(a.algo, g);
  HoldoutSpec hs;
  hs.fraction = a.fraction;
  hs.per_row = a.per_row;
  hs.nonzeros_only = !a.all_entries;

  const auto& names = all_metric_names();
  std::vector<std::vector<double>> values(a.repetitions);
  json reps = json::array();
  for (std::size_t r = 0; r < a.repetitions; ++r) {
    const std::uint64_t seed = derive_seed(g.seed, r);
    const PatternMatrix holdout = sample_holdout(A, hs, seed);
    FactorizeOptions ro = o;
    ro.cancer.seed = seed;
    const FactorizeResult fr = factorize(mask_holdout(A, holdout), ro);
    const PredictionReport rep =
        evaluate_prediction(A, reconstruct(fr.factors), holdout);
    for (const auto& m : names) values[r].push_back(metric_value(rep, m));
    json j = report_json(rep, names);
    j["rep"] = r;
    j["seed"] = seed;
    j["wall_seconds"] = fr.seconds;
    reps.push_back(j);
    note(g, "rep " + std::to_string(r) + ": accuracy_nonzero " +
                format_double(rep.accuracy_nonzero));
  }

  std::ostringstream csv;
  csv << "row";
  for (const auto& m : names) csv << ',' << m;
  csv << '\n';
  auto put = [&](const std::string& label, const std::vector<double>& v) {
    csv << label;
    for (double x : v) csv << ',' << (std::isnan(x) ? "NaN" : format_double(x));
    csv << '\n';
  };
  std::vector<double> mean(names.size()), sd(names.size());
  for (std::size_t m = 0; m < names.size(); ++m) {
    double s = 0.0, n = 0.0;
    for (const auto& v : values) {
      if (!std::isnan(v[m])) s += v[m], n += 1.0;
    }
    mean[m] = n > 0 ? s / n : std::numeric_limits<double>::quiet_NaN();
    double q = 0.0;
    for (const auto& v : values) {
      if (!std::isnan(v[m])) q += (v[m] - mean[m]) * (v[m] - mean[m]);
    }
    sd[m] = n > 1 ? std::sqrt(q / (n - 1)) : (n == 1 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
  }
  for (std::size_t r = 0; r < values.size(); ++r) put(std::to_string(r), values[r]);
  put("mean", mean);
  put("std", sd);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_text(dir / "report.csv", csv.str());
  json s;
  s["input"] = a.input;
  s["params"] = params_json(o, o.cycles.value_or(default_cycles(o.algorithm)),
                            o.objective.value_or(std::string(
                                default_objective(o.algorithm))));
  s["holdout"] = {{"fraction", a.fraction ? json(*a.fraction) : json(nullptr)},
                  {"per_row", a.per_row ? json(*a.per_row) : json(nullptr)},
                  {"nonzeros_only", hs.nonzeros_only}};
  s["seed"] = g.seed;
  s["repetitions"] = reps;
  json mj;
  for (std::size_t m = 0; m < names.size(); ++m) {
    mj[names[m]] = {{"mean", mean[m]}, {"std", sd[m]}};
  }
  s["summary"] = mj;
  write_json(dir / "report.json", s);
  std::cout << csv.str();
  return kOk;
}

// ----------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config;
  std::string out;
  bool plots_only = false;
};

int cmd_experiment(const ExperimentArgs& a, const Globals& g,
                   bool seed_given) {
  ExperimentConfig cfg = read_experiment_config(a.config);
  if (seed_given) cfg.seed = g.seed;
  const fs::path dir = a.out.empty() ? fs::path(cfg.name) : fs::path(a.out);

  if (a.plots_only) {
    std::ifstream in(dir / "results.csv");
    if (!in) throw DataError("no results.csv in " + dir.string());
    const Table t = read_table(in);
    if (cfg.plot_x.empty()) throw UsageError("config has no plot_x");
    for (const auto& y : cfg.plot_y) {
      write_text(dir / (cfg.name + "_" + y + ".svg"),
                 plot_results(t, cfg.plot_x, y, cfg.name));
    }
    return kOk;
  }

  const std::size_t total = expand_grid(cfg).size();
  std::size_t done = 0;
  const auto results = run_experiment(cfg, g.jobs, [&](const RunResult& r) {
    ++done;
    if (!g.quiet) {
      std::cerr << "[" << done << "/" << total << "] run " << r.spec.run << ' '
                << algorithm_name(r.spec.algorithm) << ' '
                << (r.ok ? "ok rel=" + format_double(r.relative_error)
                         : "failed: " + r.message)
                << '\n';
    }
  });
  write_experiment_outputs(dir, cfg, results);
  std::size_t failed = 0;
  for (const auto& r : results) failed += !r.ok;
  note(g, "wrote " + (dir / "results.csv").string() + " (" +
              std::to_string(results.size()) + " runs, " +
              std::to_string(failed) + " failed)");
  return failed ? kRuntime : kOk;
}

// ------------------------------------------------------------- selftest

int cmd_selftest(const Globals& g) {
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    failures += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << name << " " << detail << '\n';
  };

  // Boolean rank against subtropical rank on every 3x3 binary matrix.
  std::size_t mismatches = 0;
  for (unsigned bits = 0; bits < 512; ++bits) {
    NonNegMatrix A(3, 3);
    for (std::size_t p = 0; p < 9; ++p) A.set(p / 3, p % 3, (bits >> p) & 1u);
    mismatches += oracle::exhaustive_subtropical_rank_binary(A) !=
                  oracle::exhaustive_boolean_rank(oracle::to_binary(A));
  }
  report("binary-rank", mismatches == 0, std::to_string(mismatches) + " mismatches");

  // Sparsity bound on random dominated decompositions.
  std::size_t violations = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 10, k = 1 + rng() % 5, m = 1 + rng() % 10;
    NonNegMatrix B(n, k), C(k, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < k; ++s) B.set(i, s, u(rng) < 0.5 ? u(rng) : 0.0);
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t j = 0; j < m; ++j) C.set(s, j, u(rng) < 0.5 ? u(rng) : 0.0);
    violations += !oracle::check_sparsity_bound(B, C).holds;
  }
  report("sparsity-bound", violations == 0, std::to_string(violations) + " violations");

  // Surrogate minimizer against the grid on quadratic single-row columns.
  std::size_t misses = 0;
  for (int t = 0; t < 100; ++t) {
    const double a = 0.05 + 0.9 * u(rng);
    const std::vector<double> ac{a}, nc{0.0}, b{1.0};
    const auto r = polymin(ac, nc, b, 2, frobenius_sq());
    misses += std::abs(r.x - a) > 1e-6;
  }
  report("polymin-quadratic", misses == 0, std::to_string(misses) + " misses");

  return failures ? kRuntime : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subtropical (max-times) matrix factorization toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--jobs,-j", g.jobs, "worker threads for experiment")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--quiet,-q", g.quiet, "suppress progress messages");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic instance");
  synth->fallthrough();
  synth->add_option("--rows,-n", sa.spec.rows)->capture_default_str();
  synth->add_option("--cols,-m", sa.spec.cols)->capture_default_str();
  synth->add_option("--rank,-k", sa.spec.rank)->capture_default_str();
  synth->add_option("--density", sa.spec.density)->capture_default_str();
  synth->add_option("--noise", sa.noise,
                    "none, tropical-density, tropical-flip or gaussian")
      ->capture_default_str();
  synth->add_option("--level", sa.level, "noise density, flip fraction or sigma");
  synth->add_option("--integer-levels", sa.spec.integer_levels,
                    "integer factors in 1..L (C binary); 0 for real values")
      ->capture_default_str();
  synth->add_option("--out,-o", sa.out, "output directory")->capture_default_str();

  FactorizeArgs fa;
  auto* fact = app.add_subcommand("factorize", "run Equator on a CSV matrix");
  fact->fallthrough();
  fact->add_option("--input,-i", fa.input, "input CSV")->required();
  fact->add_flag("--skip-header", fa.skip_header);
  fact->add_option("--out,-o", fa.out, "output directory")->capture_default_str();
  add_algo_options(fact, fa.algo);

  ReconstructArgs ra;
  auto* recon = app.add_subcommand("reconstruct", "compute B ⊠ C");
  recon->fallthrough();
  recon->add_option("--B", ra.b)->required();
  recon->add_option("--C", ra.c)->required();
  recon->add_option("--out,-o", ra.out, "output CSV (stdout by default)");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "score a reconstruction");
  eval->fallthrough();
  eval->add_option("--truth", ea.truth)->required();
  eval->add_option("--pred", ea.pred, "predicted matrix CSV");
  eval->add_option("--B", ea.b);
  eval->add_option("--C", ea.c);
  eval->add_option("--holdout", ea.holdout,
                   "0/1 CSV of scored entries (default: all observed)");
  eval->add_option("--metrics", ea.metrics, "comma list or 'all'")
      ->capture_default_str();
  eval->add_option("--json", ea.json_out, "write the report as JSON");
  eval->add_option("--csv", ea.csv_out, "write metric,value rows");

  PredictArgs pa;
  auto* pred = app.add_subcommand("predict", "hold out entries and score predictions");
  pred->fallthrough();
  pred->add_option("--input,-i", pa.input)->required();
  pred->add_flag("--skip-header", pa.skip_header);
  pred->add_option("--holdout-fraction", pa.fraction, "fraction of candidate entries");
  pred->add_option("--per-row", pa.per_row, "entries held out from every row");
  pred->add_flag("--all-entries", pa.all_entries, "allow zeros in the holdout");
  pred->add_option("--repetitions,-r", pa.repetitions)->capture_default_str();
  pred->add_option("--out,-o", pa.out, "output directory")->capture_default_str();
  add_algo_options(pred, pa.algo);

  ExperimentArgs xa;
  auto* exp = app.add_subcommand("experiment", "run a parameter sweep");
  exp->fallthrough();
  exp->add_option("--config,-c", xa.config)->required();
  exp->add_option("--out,-o", xa.out, "output directory (default: config name)");
  exp->add_flag("--plots-only", xa.plots_only,
                "redraw plots from an existing results.csv");

  auto* self = app.add_subcommand("selftest", "");
  self->group("");
  self->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(sa, g);
    if (*fact) return cmd_factorize(fa, g);
    if (*recon) return cmd_reconstruct(ra, g);
    if (*eval) return cmd_evaluate(ea, g);
    if (*pred) return cmd_predict(pa, g);
    if (*exp) return cmd_experiment(xa, g, app.count("--seed") > 0);
    if (*self) return cmd_selftest(g);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
