#include "subtrop/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "subtrop/csv.hpp"
#include "subtrop/error.hpp"
#include "subtrop/eval.hpp"
#include "subtrop/objective.hpp"
#include "subtrop/svg.hpp"

namespace subtrop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError(what + ": '" + s + "' is not a number");
  }
  return v;
}

std::size_t to_size(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError(what + ": '" + s + "' is not a nonnegative integer");
  }
  return v;
}

bool to_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw UsageError(what + ": '" + s + "' is not a boolean");
}

const std::map<std::string, std::string>& axis_defaults() {
  static const std::map<std::string, std::string> d{
      {"rows", "200"},        {"cols", "160"},          {"true_rank", "5"},
      {"rank", "true_rank"},  {"density", "0.3"},       {"noise", "none"},
      {"noise_level", "0"},   {"integer_levels", "0"},  {"algorithm", "capricorn"}};
  return d;
}

void apply_key(ExperimentConfig& cfg, const std::string& section,
               const std::string& key, const std::string& value,
               const std::string& where) {
  const std::string what = where + " " + key;
  if (section == "experiment") {
    if (key == "name") cfg.name = value;
    else if (key == "repetitions") cfg.repetitions = to_size(value, what);
    else if (key == "seed") cfg.seed = to_size(value, what);
    else if (key == "plot_x") cfg.plot_x = value;
    else if (key == "plot_y") cfg.plot_y = split_list(value);
    else throw UsageError(what + ": unknown key");
  } else if (section == "sweep") {
    const auto& axes = experiment_axes();
    if (std::find(axes.begin(), axes.end(), key) == axes.end()) {
      throw UsageError(what + ": unknown sweep axis");
    }
    auto values = split_list(value);
    if (values.empty()) throw UsageError(what + ": empty list");
    cfg.axes[key] = std::move(values);
  } else if (section == "capricorn") {
    if (key == "bucket_size") cfg.capricorn.bucket_size = to_size(value, what);
    else if (key == "delta") cfg.capricorn.delta = to_double(value, what);
    else if (key == "theta") cfg.capricorn.theta = to_double(value, what);
    else if (key == "tau") cfg.capricorn.tau = to_double(value, what);
    else if (key == "cycles") cfg.capricorn_cycles = to_size(value, what);
    else if (key == "objective") cfg.capricorn_objective = value;
    else throw UsageError(what + ": unknown key");
  } else if (section == "cancer") {
    if (key == "max_degree") {
      cfg.cancer.max_degree = static_cast<int>(to_size(value, what));
    } else if (key == "update_fraction") {
      cfg.cancer.update_fraction = to_double(value, what);
    } else if (key == "cycles") {
      cfg.cancer_cycles = to_size(value, what);
    } else if (key == "objective") {
      cfg.cancer_objective = value;
    } else if (key == "rescale") {
      cfg.rescale = to_bool(value, what);
    } else if (key == "random_abscissae") {
      cfg.cancer.random_abscissae = to_bool(value, what);
    } else {
      throw UsageError(what + ": unknown key");
    }
  } else if (section == "predict") {
    if (key == "holdout_fraction") cfg.holdout_fraction = to_double(value, what);
    else if (key == "nonzeros_only") cfg.holdout_nonzeros_only = to_bool(value, what);
    else throw UsageError(what + ": unknown key");
  } else {
    throw UsageError(what + ": key outside a known section");
  }
}

std::string axis_value(const ExperimentConfig& cfg, const std::string& axis,
                       std::size_t index) {
  const auto it = cfg.axes.find(axis);
  if (it == cfg.axes.end()) return axis_defaults().at(axis);
  return it->second[index];
}

std::size_t axis_size(const ExperimentConfig& cfg, const std::string& axis) {
  const auto it = cfg.axes.find(axis);
  return it == cfg.axes.end() ? 1 : it->second.size();
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known{"experiment", "sweep",
                                               "capricorn", "cancer", "predict"};
      if (!known.count(section)) {
        throw UsageError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
              where);
  }
  if (cfg.repetitions == 0) throw UsageError("repetitions must be >= 1");
  cfg.capricorn.validate();
  cfg.cancer.validate();
  objective_from_name(cfg.capricorn_objective);
  objective_from_name(cfg.cancer_objective);
  if (!cfg.plot_x.empty()) {
    const auto& axes = experiment_axes();
    if (std::find(axes.begin(), axes.end(), cfg.plot_x) == axes.end()) {
      throw UsageError("plot_x '" + cfg.plot_x + "' is not a sweep axis");
    }
  }
  // Validate every grid value up front so typos fail before any run starts.
  expand_grid(cfg);
  return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  return parse_experiment_config(in);
}

std::vector<RunSpec> expand_grid(const ExperimentConfig& cfg) {
  const auto& axes = experiment_axes();
  std::size_t points = 1;
  for (const auto& a : axes) points *= axis_size(cfg, a);

  std::vector<RunSpec> out;
  out.reserve(points * cfg.repetitions);
  for (std::size_t p = 0; p < points; ++p) {
    std::map<std::string, std::string> v;
    std::size_t rest = p;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const std::size_t sz = axis_size(cfg, *it);
      v[*it] = axis_value(cfg, *it, rest % sz);
      rest /= sz;
    }
    SynthSpec s;
    s.rows = to_size(v["rows"], "rows");
    s.cols = to_size(v["cols"], "cols");
    s.rank = to_size(v["true_rank"], "true_rank");
    s.density = to_double(v["density"], "density");
    s.noise.kind = noise_kind_from_name(v["noise"]);
    s.noise.level = to_double(v["noise_level"], "noise_level");
    s.integer_levels = static_cast<int>(to_size(v["integer_levels"], "integer_levels"));
    if (s.rows == 0 || s.cols == 0 || s.rank == 0) {
      throw UsageError("rows, cols and true_rank must be positive");
    }
    const std::size_t rank =
        v["rank"] == "true_rank" ? s.rank : to_size(v["rank"], "rank");
    if (rank == 0) throw UsageError("rank must be positive");
    const Algorithm alg = algorithm_from_name(v["algorithm"]);
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
      RunSpec spec;
      spec.run = out.size();
      spec.point = p;
      spec.rep = r;
      spec.seed = derive_seed(cfg.seed, r);
      spec.synth = s;
      spec.synth.seed = spec.seed;
      spec.rank = rank;
      spec.algorithm = alg;
      out.push_back(spec);
    }
  }
  return out;
}

RunResult execute_run(const RunSpec& spec, const ExperimentConfig& cfg) {
  RunResult res;
  res.spec = spec;
  res.accuracy = res.accuracy_nonzero = res.baseline_accuracy_nonzero = kNaN;
  res.rmse = kNaN;
  res.holdout_fraction = cfg.holdout_fraction.value_or(kNaN);
  const bool cancer = spec.algorithm == Algorithm::kCancer;
  res.objective = cancer ? cfg.cancer_objective : cfg.capricorn_objective;
  res.cycles = cancer ? cfg.cancer_cycles : cfg.capricorn_cycles;
  try {
    const SynthInstance inst = generate_instance(spec.synth);
    NonNegMatrix train = inst.noisy;
    std::optional<PatternMatrix> holdout;
    if (cfg.holdout_fraction) {
      HoldoutSpec hs;
      hs.fraction = cfg.holdout_fraction;
      hs.nonzeros_only = cfg.holdout_nonzeros_only;
      holdout = sample_holdout(inst.noisy, hs, derive_seed(spec.seed, 2));
      train = mask_holdout(inst.noisy, *holdout);
    }

    FactorizeOptions opt;
    opt.algorithm = spec.algorithm;
    opt.rank = spec.rank;
    opt.cycles = res.cycles;
    opt.objective = res.objective;
    opt.capricorn = cfg.capricorn;
    opt.cancer = cfg.cancer;
    opt.cancer.seed = spec.seed;
    opt.rescale = cfg.rescale;
    const FactorizeResult fr = factorize(train, opt);
    const NonNegMatrix R = reconstruct(fr.factors);

    res.best_error = fr.best_error;
    res.relative_error = fr.relative_error;
    res.relative_error_clean = relative_frobenius(inst.clean, R);
    res.noise_floor = relative_frobenius(inst.clean, inst.noisy);
    res.sparsity_B = sparsity(fr.factors.B);
    res.sparsity_C = sparsity(fr.factors.C);
    res.seconds = fr.seconds;

    if (holdout && holdout->count() > 0) {
      res.accuracy = prediction_accuracy(inst.noisy, R, *holdout, false);
      res.rmse = holdout_rmse(inst.noisy, R, *holdout);
      bool any_nonzero = false;
      for (std::size_t i = 0; i < holdout->rows() && !any_nonzero; ++i) {
        for (std::size_t j = 0; j < holdout->cols(); ++j) {
          if ((*holdout)(i, j) && inst.noisy(i, j) != 0.0) any_nonzero = true;
        }
      }
      if (any_nonzero) {
        res.accuracy_nonzero = prediction_accuracy(inst.noisy, R, *holdout, true);
        const double majority = majority_value(train, true);
        const NonNegMatrix constant(R.rows(), R.cols(), majority);
        res.baseline_accuracy_nonzero =
            prediction_accuracy(inst.noisy, constant, *holdout, true);
      }
    }
    res.ok = true;
  } catch (const std::exception& e) {
    res.ok = false;
    res.message = e.what();
  }
  return res;
}

std::vector<RunResult> run_experiment(
    const ExperimentConfig& cfg, unsigned jobs,
    const std::function<void(const RunResult&)>& on_done) {
  const std::vector<RunSpec> specs = expand_grid(cfg);
  std::vector<RunResult> results(specs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t t = next++; t < specs.size(); t = next++) {
      results[t] = execute_run(specs[t], cfg);
      if (on_done) {
        std::lock_guard<std::mutex> lock(report);
        on_done(results[t]);
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(specs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return results;
}

const std::vector<std::string>& results_columns() {
  static const std::vector<std::string> cols{
      "run", "point", "rep", "seed", "rows", "cols", "true_rank", "rank",
      "density", "noise", "noise_level", "integer_levels", "algorithm",
      "objective", "cycles", "holdout_fraction", "relative_error",
      "relative_error_clean", "noise_floor", "best_error", "sparsity_B",
      "sparsity_C", "accuracy", "accuracy_nonzero",
      "baseline_accuracy_nonzero", "rmse", "seconds", "status", "message"};
  return cols;
}

namespace {

std::string cell(double v) {
  return std::isnan(v) ? "NaN" : format_double(v);
}

std::string clean_message(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows) {
  const auto& cols = results_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const auto& r : rows) {
    const auto& s = r.spec;
    out << s.run << ',' << s.point << ',' << s.rep << ',' << s.seed << ','
        << s.synth.rows << ',' << s.synth.cols << ',' << s.synth.rank << ','
        << s.rank << ',' << format_double(s.synth.density) << ','
        << noise_kind_name(s.synth.noise.kind) << ','
        << format_double(s.synth.noise.level) << ',' << s.synth.integer_levels
        << ',' << algorithm_name(s.algorithm) << ',' << r.objective << ','
        << r.cycles << ',' << cell(r.holdout_fraction) << ',';
    out << cell(r.relative_error) << ',' << cell(r.relative_error_clean) << ','
        << cell(r.noise_floor) << ',' << cell(r.best_error) << ','
        << cell(r.sparsity_B) << ',' << cell(r.sparsity_C) << ','
        << cell(r.accuracy) << ',' << cell(r.accuracy_nonzero) << ','
        << cell(r.baseline_accuracy_nonzero) << ',' << cell(r.rmse) << ','
        << cell(r.seconds) << ',' << (r.ok ? "ok" : "failed") << ','
        << clean_message(r.message) << '\n';
  }
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("results table has no column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

Table read_table(std::istream& in) {
  Table t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw DataError("results table is empty");
  t.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw DataError("results table line " + std::to_string(line_no) +
                      " has " + std::to_string(cells.size()) + " cells");
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

namespace {

const std::vector<std::string>& summary_metrics() {
  static const std::vector<std::string> m{
      "relative_error", "relative_error_clean", "noise_floor", "sparsity_B",
      "sparsity_C", "accuracy", "accuracy_nonzero",
      "baseline_accuracy_nonzero", "rmse", "seconds"};
  return m;
}

double parse_cell(const std::string& s) {
  if (s.empty() || s == "NaN") return kNaN;
  double v = kNaN;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

struct Stats {
  std::size_t count = 0;
  double mean = kNaN;
  double std = kNaN;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  s.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    s.std = 0.0;
    return s;
  }
  CompensatedSum sq;
  for (double x : xs) sq.add((x - s.mean) * (x - s.mean));
  s.std = std::sqrt(sq.value() / static_cast<double>(xs.size() - 1));
  return s;
}

// Grid points in first-appearance order.
std::vector<std::size_t> point_order(const Table& t, std::size_t point_col) {
  std::vector<std::size_t> first_rows;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (seen.insert(t.rows[r][point_col]).second) first_rows.push_back(r);
  }
  return first_rows;
}

}  // namespace

void write_summary_csv(std::ostream& out, const Table& t) {
  const std::size_t point_col = t.column("point");
  const std::size_t status_col = t.column("status");
  std::vector<std::string> params = experiment_axes();
  params.insert(params.begin() + 8, {"objective", "cycles"});
  params.erase(std::remove_if(params.begin(), params.end(),
                              [&](const std::string& p) {
                                return std::find(t.header.begin(), t.header.end(),
                                                 p) == t.header.end();
                              }),
               params.end());

  out << "point";
  for (const auto& p : params) out << ',' << p;
  out << ",metric,count,failed,mean,std,half_width\n";
  for (std::size_t first : point_order(t, point_col)) {
    const std::string& point = t.rows[first][point_col];
    std::size_t failed = 0;
    for (const auto& row : t.rows) {
      failed += row[point_col] == point && row[status_col] != "ok";
    }
    for (const auto& metric : summary_metrics()) {
      if (std::find(t.header.begin(), t.header.end(), metric) == t.header.end()) {
        continue;
      }
      const std::size_t mc = t.column(metric);
      std::vector<double> xs;
      for (const auto& row : t.rows) {
        if (row[point_col] != point || row[status_col] != "ok") continue;
        const double v = parse_cell(row[mc]);
        if (!std::isnan(v)) xs.push_back(v);
      }
      if (xs.empty()) continue;
      const Stats s = stats_of(xs);
      out << point;
      for (const auto& p : params) out << ',' << t.rows[first][t.column(p)];
      out << ',' << metric << ',' << s.count << ',' << failed << ','
          << cell(s.mean) << ',' << cell(s.std) << ',' << cell(2.0 * s.std)
          << '\n';
    }
  }
}

std::string plot_results(const Table& t, const std::string& x,
                         const std::string& y, const std::string& title) {
  const std::size_t xc = t.column(x), yc = t.column(y);
  const std::size_t status_col = t.column("status");

  // Series are keyed by the other sweep columns that take several values.
  std::vector<std::size_t> key_cols;
  for (const auto& axis : experiment_axes()) {
    if (axis == x) continue;
    const auto it = std::find(t.header.begin(), t.header.end(), axis);
    if (it == t.header.end()) continue;
    const std::size_t c = static_cast<std::size_t>(it - t.header.begin());
    std::set<std::string> distinct;
    for (const auto& row : t.rows) distinct.insert(row[c]);
    if (distinct.size() > 1) key_cols.push_back(c);
  }

  std::vector<std::string> labels;
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto& row : t.rows) {
    if (row[status_col] != "ok") continue;
    std::string label;
    for (std::size_t c : key_cols) {
      label += (label.empty() ? "" : " ") + t.header[c] + "=" + row[c];
    }
    if (label.empty()) label = y;
    if (!groups.count(label)) labels.push_back(label);
    const double xv = parse_cell(row[xc]);
    const double yv = parse_cell(row[yc]);
    if (std::isnan(xv)) {
      throw DataError("plot: column " + x + " is not numeric");
    }
    auto& bucket = groups[label][xv];
    if (!std::isnan(yv)) bucket.push_back(yv);
  }

  LinePlot plot;
  plot.title = title;
  plot.x_label = x;
  plot.y_label = y + " (mean +- 2 std)";
  for (const auto& label : labels) {
    PlotSeries s;
    s.label = label;
    for (const auto& [xv, ys] : groups[label]) {
      if (ys.empty()) continue;
      const Stats st = stats_of(ys);
      s.points.push_back({xv, st.mean, 2.0 * st.std});
    }
    plot.series.push_back(std::move(s));
  }
  return render_svg(plot);
}

void write_experiment_outputs(const std::filesystem::path& dir,
                              const ExperimentConfig& cfg,
                              const std::vector<RunResult>& results) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  write_results_csv(csv, results);
  {
    std::ofstream out(dir / "results.csv");
    if (!out) throw DataError("cannot write " + (dir / "results.csv").string());
    out << csv.str();
  }
  std::istringstream back(csv.str());
  const Table table = read_table(back);
  {
    std::ofstream out(dir / "summary.csv");
    write_summary_csv(out, table);
  }
  if (cfg.plot_x.empty()) return;
  for (const auto& y : cfg.plot_y) {
    std::ofstream out(dir / (cfg.name + "_" + y + ".svg"));
    out << plot_results(table, cfg.plot_x, y, cfg.name);
  }
}

}  // namespace subtrop
