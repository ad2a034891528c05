#include "subtrop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "subtrop/error.hpp"
#include "subtrop/objective.hpp"

namespace subtrop {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_inputs(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                  const PatternMatrix& holdout) {
  if (truth.rows() != prediction.rows() || truth.cols() != prediction.cols() ||
      truth.rows() != holdout.rows() || truth.cols() != holdout.cols()) {
    throw std::invalid_argument("evaluation inputs have different shapes");
  }
  for (std::size_t i = 0; i < truth.rows(); ++i) {
    for (std::size_t j = 0; j < truth.cols(); ++j) {
      if (holdout(i, j) &&
          (!truth.is_observed(i, j) || !prediction.is_observed(i, j))) {
        throw DataError("holdout entry (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) + ") is missing in the input");
      }
    }
  }
}

template <class F>
void for_each_holdout(const PatternMatrix& holdout, F&& f) {
  for (std::size_t i = 0; i < holdout.rows(); ++i) {
    for (std::size_t j = 0; j < holdout.cols(); ++j) {
      if (holdout(i, j)) f(i, j);
    }
  }
}

struct HoldoutRow {
  std::vector<double> truth;
  std::vector<double> prediction;
};

std::vector<HoldoutRow> holdout_rows(const NonNegMatrix& truth,
                                     const NonNegMatrix& prediction,
                                     const PatternMatrix& holdout) {
  std::vector<HoldoutRow> rows(truth.rows());
  for_each_holdout(holdout, [&](std::size_t i, std::size_t j) {
    rows[i].truth.push_back(truth(i, j));
    rows[i].prediction.push_back(prediction(i, j));
  });
  return rows;
}

template <class RowFn>
RowAverage average_rows(const std::vector<HoldoutRow>& rows,
                        std::size_t min_entries, RowFn&& fn) {
  RowAverage out;
  CompensatedSum sum;
  for (const auto& r : rows) {
    if (r.truth.empty()) continue;
    double v = 0.0;
    if (r.truth.size() < min_entries || !fn(r, v)) {
      ++out.rows_skipped;
      continue;
    }
    sum.add(v);
    ++out.rows_used;
  }
  out.value = out.rows_used ? sum.value() / static_cast<double>(out.rows_used)
                            : kNaN;
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y,
               bool& ok) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  ok = sxx > 0.0 && syy > 0.0;
  return ok ? sxy / std::sqrt(sxx * syy) : 0.0;
}

}  // namespace

double prediction_accuracy(const NonNegMatrix& truth,
                           const NonNegMatrix& prediction,
                           const PatternMatrix& holdout, bool ignore_zeros) {
  check_inputs(truth, prediction, holdout);
  std::size_t hits = 0, total = 0;
  for_each_holdout(holdout, [&](std::size_t i, std::size_t j) {
    if (ignore_zeros && truth(i, j) == 0.0) return;
    ++total;
    hits += std::round(prediction(i, j)) == truth(i, j);
  });
  if (total == 0) throw DataError("accuracy: empty effective holdout set");
  return static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

template <class F>
double holdout_mean(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                    const PatternMatrix& holdout, F&& f) {
  check_inputs(truth, prediction, holdout);
  CompensatedSum sum;
  std::size_t count = 0;
  for_each_holdout(holdout, [&](std::size_t i, std::size_t j) {
    sum.add(f(truth(i, j), prediction(i, j)));
    ++count;
  });
  if (count == 0) throw DataError("holdout set is empty");
  return sum.value() / static_cast<double>(count);
}

}  // namespace

double holdout_frobenius(const NonNegMatrix& truth,
                         const NonNegMatrix& prediction,
                         const PatternMatrix& holdout) {
  const double mean = holdout_mean(truth, prediction, holdout, phi::frobenius);
  return std::sqrt(mean * static_cast<double>(holdout.count()));
}

double holdout_rmse(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                    const PatternMatrix& holdout) {
  return std::sqrt(holdout_mean(truth, prediction, holdout, phi::frobenius));
}

double holdout_mae(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                   const PatternMatrix& holdout) {
  return holdout_mean(truth, prediction, holdout, phi::l1);
}

double holdout_js(const NonNegMatrix& truth, const NonNegMatrix& prediction,
                  const PatternMatrix& holdout) {
  return holdout_mean(truth, prediction, holdout, phi::jensen_shannon);
}

std::vector<double> descending_ranks(const std::vector<double>& values,
                                     bool optimistic) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t a = 0; a < n;) {
    std::size_t b = a;
    while (b < n && values[order[b]] == values[order[a]]) ++b;
    // Positions a+1 .. b share one rank.
    const double rank = optimistic ? static_cast<double>(a + 1)
                                   : 0.5 * static_cast<double>(a + 1 + b);
    for (std::size_t t = a; t < b; ++t) ranks[order[t]] = rank;
    a = b;
  }
  return ranks;
}

RowAverage mean_reciprocal_rank(const NonNegMatrix& truth,
                                const NonNegMatrix& prediction,
                                const PatternMatrix& holdout,
                                bool optimistic) {
  check_inputs(truth, prediction, holdout);
  const auto rows = holdout_rows(truth, prediction, holdout);
  RowAverage out = average_rows(rows, 1, [&](const HoldoutRow& r, double& v) {
    const auto ranks = descending_ranks(r.prediction, optimistic);
    const double top = *std::max_element(r.truth.begin(), r.truth.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < r.truth.size(); ++t) {
      if (r.truth[t] == top) best = std::min(best, ranks[t]);
    }
    v = 1.0 / best;
    return true;
  });
  if (out.rows_used == 0) {
    throw DataError("reciprocal rank: no row has a holdout entry");
  }
  return out;
}

bool spearman_row(const std::vector<double>& x, const std::vector<double>& y,
                  double& rho) {
  if (x.size() < 2 || x.size() != y.size()) return false;
  bool ok = false;
  rho = pearson(descending_ranks(x, false), descending_ranks(y, false), ok);
  return ok;
}

bool kendall_row(const std::vector<double>& x, const std::vector<double>& y,
                 double& tau) {
  if (x.size() < 2 || x.size() != y.size()) return false;
  // tau-b = sum sgn(dx) sgn(dy) / sqrt(sum sgn(dx)^2 * sum sgn(dy)^2)
  auto sgn = [](double d) { return static_cast<double>((d > 0) - (d < 0)); };
  double s = 0.0, tx = 0.0, ty = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = a + 1; b < x.size(); ++b) {
      const double sx = sgn(x[a] - x[b]);
      const double sy = sgn(y[a] - y[b]);
      s += sx * sy;
      tx += sx * sx;
      ty += sy * sy;
    }
  }
  if (tx == 0.0 || ty == 0.0) return false;
  tau = s / std::sqrt(tx * ty);
  return true;
}

RowAverage spearman_rho(const NonNegMatrix& truth,
                        const NonNegMatrix& prediction,
                        const PatternMatrix& holdout) {
  check_inputs(truth, prediction, holdout);
  return average_rows(holdout_rows(truth, prediction, holdout), 2,
                      [](const HoldoutRow& r, double& v) {
                        return spearman_row(r.truth, r.prediction, v);
                      });
}

RowAverage kendall_tau(const NonNegMatrix& truth,
                       const NonNegMatrix& prediction,
                       const PatternMatrix& holdout) {
  check_inputs(truth, prediction, holdout);
  return average_rows(holdout_rows(truth, prediction, holdout), 2,
                      [](const HoldoutRow& r, double& v) {
                        return kendall_row(r.truth, r.prediction, v);
                      });
}

PredictionReport evaluate_prediction(const NonNegMatrix& truth,
                                     const NonNegMatrix& prediction,
                                     const PatternMatrix& holdout) {
  check_inputs(truth, prediction, holdout);
  PredictionReport rep;
  rep.evaluated = holdout.count();
  if (rep.evaluated == 0) throw DataError("holdout set is empty");
  for_each_holdout(holdout, [&](std::size_t i, std::size_t j) {
    rep.evaluated_nonzero += truth(i, j) != 0.0;
  });
  rep.frobenius = holdout_frobenius(truth, prediction, holdout);
  rep.rmse = holdout_rmse(truth, prediction, holdout);
  rep.mae = holdout_mae(truth, prediction, holdout);
  rep.js = holdout_js(truth, prediction, holdout);
  rep.accuracy = prediction_accuracy(truth, prediction, holdout, false);
  rep.accuracy_nonzero =
      rep.evaluated_nonzero
          ? prediction_accuracy(truth, prediction, holdout, true)
          : kNaN;
  rep.spearman = spearman_rho(truth, prediction, holdout);
  rep.kendall = kendall_tau(truth, prediction, holdout);
  rep.mrr = mean_reciprocal_rank(truth, prediction, holdout, false);
  rep.mrr_optimistic = mean_reciprocal_rank(truth, prediction, holdout, true);
  return rep;
}

double metric_value(const PredictionReport& r, const std::string& name) {
  if (name == "frobenius") return r.frobenius;
  if (name == "rmse") return r.rmse;
  if (name == "mae") return r.mae;
  if (name == "js") return r.js;
  if (name == "accuracy") return r.accuracy;
  if (name == "accuracy_nonzero") return r.accuracy_nonzero;
  if (name == "spearman_rho") return r.spearman.value;
  if (name == "kendall_tau") return r.kendall.value;
  if (name == "mrr") return r.mrr.value;
  if (name == "mrr_optimistic") return r.mrr_optimistic.value;
  throw UsageError("unknown metric '" + name + "'");
}

double majority_value(const NonNegMatrix& A, bool nonzeros_only) {
  std::map<double, std::size_t> counts;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (!A.is_observed(i, j)) continue;
      const double v = std::round(A(i, j));
      if (nonzeros_only && v == 0.0) continue;
      ++counts[v];
    }
  }
  if (counts.empty()) throw DataError("majority_value: no candidate entries");
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

PatternMatrix pattern_from_matrix(const NonNegMatrix& M) {
  PatternMatrix P(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) {
      P.set(i, j, M.is_observed(i, j) && M(i, j) != 0.0);
    }
  }
  return P;
}

NonNegMatrix matrix_from_pattern(const PatternMatrix& P) {
  NonNegMatrix M(P.rows(), P.cols());
  for (std::size_t i = 0; i < P.rows(); ++i) {
    for (std::size_t j = 0; j < P.cols(); ++j) M.set(i, j, P(i, j) ? 1.0 : 0.0);
  }
  return M;
}

}  // namespace subtrop
