#ifndef SUBTROP_EVAL_HPP_
#define SUBTROP_EVAL_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "subtrop/matrix.hpp"

namespace subtrop {

// Neumaier-compensated running sum; keeps per-row reductions order-stable.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

// A per-row metric averaged over the rows it could be computed on.
struct RowAverage {
  double value = 0.0;
  std::size_t rows_used = 0;
  std::size_t rows_skipped = 0;
};

// Fraction of holdout entries where round(prediction) equals the truth. With
// `ignore_zeros`, entries whose true value is 0 are left out.
double prediction_accuracy(const NonNegMatrix& truth,
                           const NonNegMatrix& prediction,
                           const PatternMatrix& holdout, bool ignore_zeros);

double holdout_frobenius(const NonNegMatrix& truth,
                         const NonNegMatrix& prediction,
                         const PatternMatrix& holdout);
double holdout_rmse(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                    const PatternMatrix& holdout);
double holdout_mae(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                   const PatternMatrix& holdout);
// Mean Jensen-Shannon cost per holdout entry.
double holdout_js(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                  const PatternMatrix& holdout);

// Ranks of `values` in descending order (1 = largest). Tied values share the
// average of their positions, or the smallest position when `optimistic`.
std::vector<double> descending_ranks(const std::vector<double>& values,
                                     bool optimistic);

// Per row: 1 / best predicted rank among the row's top-rated holdout items,
// ranking only within the row's holdout entries. Rows without holdout entries
// are skipped.
RowAverage mean_reciprocal_rank(const NonNegMatrix& truth,
                                const NonNegMatrix& prediction,
                                const PatternMatrix& holdout, bool optimistic);

// Tie-corrected coefficients per row (Spearman: Pearson correlation of average
// ranks; Kendall: tau-b), averaged over rows with >= 2 holdout entries and
// nonzero variance on both sides.
RowAverage spearman_rho(const NonNegMatrix& truth,
                        const NonNegMatrix& prediction,
                        const PatternMatrix& holdout);
RowAverage kendall_tau(const NonNegMatrix& truth,
                       const NonNegMatrix& prediction,
                       const PatternMatrix& holdout);

// Single-row versions; return false when the row is degenerate.
bool spearman_row(const std::vector<double>& x, const std::vector<double>& y,
                  double& rho);
bool kendall_row(const std::vector<double>& x, const std::vector<double>& y,
                 double& tau);

struct PredictionReport {
  std::size_t evaluated = 0;
  std::size_t evaluated_nonzero = 0;
  double frobenius = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double js = 0.0;
  double accuracy = 0.0;
  double accuracy_nonzero = 0.0;
  RowAverage spearman;
  RowAverage kendall;
  RowAverage mrr;
  RowAverage mrr_optimistic;
};

inline const std::vector<std::string>& all_metric_names() {
  static const std::vector<std::string> names{
      "frobenius", "rmse",        "mae",          "js",  "accuracy",
      "accuracy_nonzero", "spearman_rho", "kendall_tau", "mrr",
      "mrr_optimistic"};
  return names;
}

// Computes every metric over the holdout. Metrics that are undefined for the
// given holdout (e.g. accuracy_nonzero with no nonzero truth) are NaN.
PredictionReport evaluate_prediction(const NonNegMatrix& truth,
                                     const NonNegMatrix& prediction,
                                     const PatternMatrix& holdout);

// Value of a named metric from a report (names as in all_metric_names()).
double metric_value(const PredictionReport& report, const std::string& name);

// Most frequent rounded value among observed entries (nonzero ones only when
// asked). Ties go to the smaller value.
double majority_value(const NonNegMatrix& A, bool nonzeros_only);

// Reads a 0/1 CSV (nonzero = held out).
PatternMatrix pattern_from_matrix(const NonNegMatrix& M);
NonNegMatrix matrix_from_pattern(const PatternMatrix& P);

}  // namespace subtrop

#endif  // SUBTROP_EVAL_HPP_
