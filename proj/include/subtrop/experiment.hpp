#ifndef SUBTROP_EXPERIMENT_HPP_
#define SUBTROP_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subtrop/cancer.hpp"
#include "subtrop/capricorn.hpp"
#include "subtrop/factorize.hpp"
#include "subtrop/synth.hpp"

namespace subtrop {

// Sweep axes in grid order. Each may hold a list of values.
inline const std::vector<std::string>& experiment_axes() {
  static const std::vector<std::string> axes{
      "rows",  "cols",        "true_rank",      "rank",     "density",
      "noise", "noise_level", "integer_levels", "algorithm"};
  return axes;
}

// Parsed from a flat text file of `key = value` lines grouped under
// [experiment], [sweep], [capricorn], [cancer] and [predict] headers. Lists
// in [sweep] are comma separated; `#` starts a comment.
struct ExperimentConfig {
  std::string name = "experiment";
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  std::map<std::string, std::vector<std::string>> axes;

  CapricornParams capricorn;
  std::size_t capricorn_cycles = 4;
  std::string capricorn_objective = "l1";
  CancerParams cancer;
  std::size_t cancer_cycles = 14;
  std::string cancer_objective = "frobenius";
  bool rescale = true;

  std::optional<double> holdout_fraction;
  bool holdout_nonzeros_only = true;

  std::string plot_x;                 // axis for the x coordinate
  std::vector<std::string> plot_y{"relative_error"};
};

// Throws UsageError naming the offending line.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

struct RunSpec {
  std::size_t run = 0;    // position in grid order
  std::size_t point = 0;  // grid point
  std::size_t rep = 0;
  std::uint64_t seed = 0;  // data seed, shared by every point of a rep
  SynthSpec synth;
  std::size_t rank = 0;
  Algorithm algorithm = Algorithm::kCapricorn;
};

// Cartesian product of the axes (first axis slowest) times repetitions.
std::vector<RunSpec> expand_grid(const ExperimentConfig& cfg);

struct RunResult {
  RunSpec spec;
  std::string objective;
  std::size_t cycles = 0;
  double holdout_fraction = 0.0;      // NaN without a holdout
  double relative_error = 0.0;        // against the data that was factorized
  double relative_error_clean = 0.0;  // against the noise-free matrix
  double noise_floor = 0.0;           // ||noisy - clean|| / ||clean||
  double best_error = 0.0;
  double sparsity_B = 0.0;
  double sparsity_C = 0.0;
  double accuracy = 0.0;
  double accuracy_nonzero = 0.0;
  double baseline_accuracy_nonzero = 0.0;
  double rmse = 0.0;
  double seconds = 0.0;
  bool ok = false;
  std::string message;
};

RunResult execute_run(const RunSpec& spec, const ExperimentConfig& cfg);

// Runs every grid point on up to `jobs` threads; results come back in grid
// order whatever the completion order.
std::vector<RunResult> run_experiment(
    const ExperimentConfig& cfg, unsigned jobs,
    const std::function<void(const RunResult&)>& on_done = {});

const std::vector<std::string>& results_columns();
void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows);

// Tidy table read back from results.csv: header plus string cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
};
Table read_table(std::istream& in);

// Per grid point and metric: count, mean, sample std and the error-bar half
// width (twice the std), over rows with status ok.
void write_summary_csv(std::ostream& out, const Table& results);

// One SVG per y column; series are the distinct combinations of the other
// columns that vary across the table.
std::string plot_results(const Table& results, const std::string& x,
                         const std::string& y, const std::string& title);

// Writes results.csv, summary.csv and the configured plots into `dir`.
void write_experiment_outputs(const std::filesystem::path& dir,
                              const ExperimentConfig& cfg,
                              const std::vector<RunResult>& results);

}  // namespace subtrop

#endif  // SUBTROP_EXPERIMENT_HPP_
