#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "subtrop/error.hpp"
#include "subtrop/experiment.hpp"
#include "subtrop/factorize.hpp"
#include "subtrop/svg.hpp"
#include "subtrop/synth.hpp"

using namespace subtrop;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"(# tiny sweep
[experiment]
name = tiny
repetitions = 2
seed = 5
plot_x = noise_level

[sweep]
rows = 20
cols = 16
true_rank = 2
rank = 2
density = 0.4
noise = tropical-flip
noise_level = 0, 0.1, 0.2
algorithm = capricorn, cancer

[cancer]
cycles = 2
)";

ExperimentConfig small_config() {
  std::istringstream in(kSmallConfig);
  return parse_experiment_config(in);
}

}  // namespace

TEST_SUITE("factorize") {

TEST_CASE("defaults") {
  CHECK(default_cycles(Algorithm::kCapricorn) == 4);
  CHECK(default_cycles(Algorithm::kCancer) == 14);
  CHECK(default_objective(Algorithm::kCapricorn) == "l1");
  CHECK(default_objective(Algorithm::kCancer) == "frobenius");
  CapricornParams cp;
  CHECK(cp.bucket_size == 3);
  CHECK(cp.delta == 0.01);
  CHECK(cp.theta == 0.5);
  CHECK(cp.tau == 0.5);
  CancerParams kp;
  CHECK(kp.max_degree == 16);
  CHECK(kp.update_fraction == 0.1);
  CHECK(algorithm_from_name("cancer") == Algorithm::kCancer);
  CHECK_THROWS_AS(algorithm_from_name("svd"), UsageError);
}

TEST_CASE("exact rank-1 input") {
  NonNegMatrix A(6, 5);
  const double b[] = {0.5, 1.0, 0.0, 0.3, 0.8, 0.2};
  const double c[] = {0.9, 0.4, 1.0, 0.0, 0.6};
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 5; ++j) A.set(i, j, b[i] * c[j]);
  }
  FactorizeOptions opt;
  opt.rank = 1;
  const auto res = factorize(A, opt);
  CHECK(res.relative_error <= 1e-6);
  CHECK(res.cycles == 4);
  CHECK(res.factors.objective_name == "l1");
}

TEST_CASE("cancer rescales and reports in data units") {
  SynthSpec spec;
  spec.rows = 30;
  spec.cols = 24;
  spec.rank = 2;
  spec.density = 0.5;
  spec.seed = 3;
  auto inst = generate_instance(spec);
  NonNegMatrix A(30, 24);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = 0; j < 24; ++j) A.set(i, j, 10.0 * inst.clean(i, j));
  }
  FactorizeOptions opt;
  opt.algorithm = Algorithm::kCancer;
  opt.rank = 2;
  opt.cycles = 3;
  const auto res = factorize(A, opt);
  CHECK(res.trace.records.size() == 1 + 2 * 3);
  CHECK(res.best_error ==
        doctest::Approx(evaluate(frobenius_sq(), A, reconstruct(res.factors)))
            .epsilon(1e-9));
  CHECK(res.relative_error < 1.0);
  CHECK(res.best_error <= res.final_error);
}

}  // TEST_SUITE

TEST_SUITE("experiment") {

TEST_CASE("config parsing and grid") {
  const auto cfg = small_config();
  CHECK(cfg.name == "tiny");
  CHECK(cfg.repetitions == 2);
  CHECK(cfg.cancer_cycles == 2);
  const auto grid = expand_grid(cfg);
  CHECK(grid.size() == 3 * 2 * 2);
  // Every point of one rep shares the data seed.
  CHECK(grid[0].seed == grid[2].seed);
  std::istringstream bad("[sweep]\nwidth = 3\n");
  CHECK_THROWS_AS(parse_experiment_config(bad), UsageError);
}

TEST_CASE("eleven noise levels times ten reps") {
  std::istringstream in(
      "[experiment]\nrepetitions = 10\n[sweep]\nnoise = tropical-flip\n"
      "noise_level = 0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0\n");
  CHECK(expand_grid(parse_experiment_config(in)).size() == 110);
}

TEST_CASE("shipped configs parse") {
  std::size_t seen = 0;
  for (const auto& e : fs::directory_iterator(SUBTROP_CONFIG_DIR)) {
    if (e.path().extension() != ".ini") continue;
    ++seen;
    CAPTURE(e.path().string());
    const auto cfg = read_experiment_config(e.path());
    CHECK(cfg.name == e.path().stem().string());
    CHECK(expand_grid(cfg).size() >= cfg.repetitions);
  }
  CHECK(seen > 0);
}

TEST_CASE("runs, summary and plots") {
  const auto cfg = small_config();
  const auto results = run_experiment(cfg, 1);
  REQUIRE(results.size() == 12);
  for (const auto& r : results) {
    CHECK(r.ok);
    CHECK(r.relative_error >= 0.0);
  }
  std::ostringstream csv;
  write_results_csv(csv, results);
  std::istringstream back(csv.str());
  const Table table = read_table(back);
  CHECK(table.rows.size() == 12);
  CHECK(table.header == results_columns());

  std::ostringstream summary;
  write_summary_csv(summary, table);
  std::istringstream sin(summary.str());
  const Table st = read_table(sin);
  const auto sd = st.column("std"), hw = st.column("half_width");
  for (const auto& row : st.rows) {
    if (row[sd].empty() || row[sd] == "nan") continue;
    CHECK(std::stod(row[hw]) == doctest::Approx(2.0 * std::stod(row[sd])));
  }

  const auto a = plot_results(table, "noise_level", "relative_error", "t");
  const auto b = plot_results(table, "noise_level", "relative_error", "t");
  CHECK(a == b);
  CHECK(a.find("<svg") != std::string::npos);

  const fs::path dir = fs::temp_directory_path() / "subtrop_exp_test";
  fs::remove_all(dir);
  write_experiment_outputs(dir, cfg, results);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  fs::remove_all(dir);
}

}  // TEST_SUITE

TEST_SUITE("svg") {

TEST_CASE("rendering is deterministic and escaped") {
  LinePlot p;
  p.title = "a < b & c";
  p.x_label = "x";
  p.y_label = "y";
  p.series.push_back({"s1", {{0, 1, 0.1}, {1, 2, 0.2}}});
  const auto svg = render_svg(p);
  CHECK(svg == render_svg(p));
  CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(xml_escape("\"<>") == "&quot;&lt;&gt;");
}

}  // TEST_SUITE
