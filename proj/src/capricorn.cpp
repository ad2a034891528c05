#include "subtrop/capricorn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "subtrop/error.hpp"

namespace subtrop {

namespace {
constexpr double kCoverTolerance = 1e-9;
constexpr int kDominatedSweeps = 16;
constexpr std::size_t kSeedAttempts = 8;
constexpr std::size_t kRepresentativeRows = 8;
}  // namespace

void CapricornParams::validate() const {
  if (bucket_size < 1) throw UsageError("bucket size must be >= 1");
  if (!(delta > 0.0)) throw UsageError("delta must be > 0");
  if (!(theta > 0.0)) throw UsageError("theta must be > 0");
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("tau must be in [0, 1]");
}

std::vector<std::size_t> find_row_set(std::span<const double> u,
                                      std::span<const double> v,
                                      std::size_t bucket_size, double delta) {
  const std::size_t m = std::min(u.size(), v.size());
  std::vector<std::size_t> valid;
  std::vector<double> ratio;
  for (std::size_t j = 0; j < m; ++j) {
    if (u[j] > 0.0 && v[j] > 0.0) {
      valid.push_back(j);
      ratio.push_back(std::log(u[j] / v[j]));
    }
  }
  if (valid.empty()) return {};

  const auto [lo_it, hi_it] = std::minmax_element(ratio.begin(), ratio.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  // Cap keeps the bucket ids representable for absurd ratio ranges.
  const double n_buckets =
      std::min(std::max(1.0, std::ceil(span / delta)), 1e15);

  std::vector<std::int64_t> bucket(valid.size());
  for (std::size_t t = 0; t < valid.size(); ++t) {
    double id = std::floor((ratio[t] - lo) / delta);
    id = std::min(id, n_buckets - 1.0);
    bucket[t] = static_cast<std::int64_t>(id);
  }

  std::vector<std::int64_t> sorted = bucket;
  std::sort(sorted.begin(), sorted.end());
  std::int64_t best_id = sorted.front();
  std::size_t best_len = 0;
  for (std::size_t a = 0; a < sorted.size();) {
    std::size_t b = a;
    while (b < sorted.size() && sorted[b] == sorted[a]) ++b;
    if (b - a > best_len) {
      best_len = b - a;
      best_id = sorted[a];
    }
    a = b;
  }
  if (best_len < bucket_size) return {};

  std::vector<std::size_t> out;
  out.reserve(best_len);
  for (std::size_t t = 0; t < valid.size(); ++t) {
    if (bucket[t] == best_id) out.push_back(valid[t]);
  }
  return out;
}

double row_correlation(const PatternMatrix& H, std::size_t seed,
                       std::size_t i) {
  double inner = 0.0, self = 0.0;
  for (std::size_t j = 0; j < H.cols(); ++j) {
    const bool hi = H(i, j);
    self += hi;
    inner += hi && H(seed, j);
  }
  return inner / (self + 1.0);
}

PatternMatrix correlations_with_row(const NonNegMatrix& R, std::size_t seed,
                                    std::size_t bucket_size, double delta,
                                    double tau) {
  const std::size_t n = R.rows(), m = R.cols();
  if (seed >= n) throw std::out_of_range("correlations_with_row: seed row");
  PatternMatrix H(n, m);
  if (n < 2) return H;

  // Missing residual entries are stored as 0, which find_row_set skips.
  const auto seed_row = R.row(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : find_row_set(seed_row, R.row(i), bucket_size, delta)) {
      H.set(i, j, true);
    }
  }

  std::size_t second = seed == 0 ? 1 : 0;
  std::size_t second_count = H.row_count(second);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == seed) continue;
    const std::size_t c = H.row_count(i);
    if (c > second_count) {
      second = i;
      second_count = c;
    }
  }
  for (std::size_t j = 0; j < m; ++j) H.set(seed, j, H(second, j));

  const double threshold = row_correlation(H, seed, second) - tau;
  for (std::size_t i = 0; i < n; ++i) {
    if (row_correlation(H, seed, i) < threshold) {
      for (std::size_t j = 0; j < m; ++j) H.set(i, j, false);
    }
  }
  return H;
}

double dominant_ratio(std::span<const double> u, std::span<const double> w,
                      std::size_t bucket_size, double delta) {
  const std::size_t len = std::min(u.size(), w.size());
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t t : find_row_set(u, w, bucket_size, delta)) {
    lo = std::min(lo, u[t] / w[t]);
  }
  if (std::isfinite(lo)) return lo;
  for (std::size_t t = 0; t < len; ++t) {
    if (u[t] > 0.0 && w[t] > 0.0) lo = std::min(lo, u[t] / w[t]);
  }
  return std::isfinite(lo) ? lo : 0.0;
}

Block recover_block(const NonNegMatrix& R, std::span<const std::size_t> b_idx,
                    std::span<const std::size_t> c_idx, std::size_t bucket_size,
                    double delta) {
  const std::size_t n = R.rows(), m = R.cols();
  Block out{std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};
  const std::size_t rn = b_idx.size(), rm = c_idx.size();
  if (rn == 0 || rm == 0) return out;

  // Restricted submatrix; missing entries are stored as 0 and skipped below.
  std::vector<double> sub(rn * rm);
  for (std::size_t a = 0; a < rn; ++a) {
    const auto row = R.row(b_idx[a]);
    for (std::size_t t = 0; t < rm; ++t) sub[a * rm + t] = row[c_idx[t]];
  }

  // b from c row by row, then c from b column by column. Returns whether
  // anything moved.
  std::vector<double> u;
  auto project = [&](std::vector<double>& b, std::vector<double>& c) {
    bool changed = false;
    u.resize(rm);
    for (std::size_t a = 0; a < rn; ++a) {
      for (std::size_t t = 0; t < rm; ++t) u[t] = sub[a * rm + t];
      const double nb = dominant_ratio(u, c, bucket_size, delta);
      changed = changed || nb != b[a];
      b[a] = nb;
    }
    u.resize(rn);
    for (std::size_t t = 0; t < rm; ++t) {
      for (std::size_t a = 0; a < rn; ++a) u[a] = sub[a * rm + t];
      const double nc = dominant_ratio(u, b, bucket_size, delta);
      changed = changed || nc != c[t];
      c[t] = nc;
    }
    return changed;
  };
  auto gap = [&](const std::vector<double>& b, const std::vector<double>& c) {
    double g = 0.0;
    for (std::size_t a = 0; a < rn; ++a) {
      for (std::size_t t = 0; t < rm; ++t) {
        const double v = sub[a * rm + t];
        if (v > 0.0) g += std::abs(v - b[a] * c[t]);
      }
    }
    return g;
  };

  // Every restricted row is tried as c and scored by the L1 misfit on the
  // core.
  std::vector<double> best_b, best_c;
  double best_gap = std::numeric_limits<double>::infinity();
  // Only the rows with the most core mass are tried.
  std::vector<std::pair<double, std::size_t>> order(rn);
  for (std::size_t a = 0; a < rn; ++a) {
    order[a] = {-std::accumulate(sub.begin() + a * rm,
                                 sub.begin() + (a + 1) * rm, 0.0),
                a};
  }
  std::sort(order.begin(), order.end());
  if (order.size() > kRepresentativeRows) order.resize(kRepresentativeRows);
  std::sort(order.begin(), order.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });

  std::vector<double> b(rn), c(rm);
  for (const auto& [neg_mass, p] : order) {
    c.assign(sub.begin() + p * rm, sub.begin() + (p + 1) * rm);
    if (std::none_of(c.begin(), c.end(), [](double v) { return v > 0.0; })) {
      continue;
    }
    project(b, c);
    const double g = gap(b, c);
    if (g < best_gap) {
      best_gap = g;
      best_b = b;
      best_c = c;
    }
  }
  if (best_b.empty()) return out;
  for (int sweep = 0; sweep < kDominatedSweeps && project(best_b, best_c);
       ++sweep) {
  }

  for (std::size_t t = 0; t < rm; ++t) out.c[c_idx[t]] = best_c[t];
  for (std::size_t a = 0; a < rn; ++a) out.b[b_idx[a]] = best_b[a];
  return out;
}

double expansion_impact(std::span<const double> a_row,
                        std::span<const double> c,
                        std::span<const std::size_t> cols, double alpha) {
  double over = 0.0, gain = 0.0;
  for (std::size_t s : cols) {
    const double x = alpha * c[s];
    over += std::max(0.0, x - a_row[s]);
    gain += a_row[s] - std::abs(a_row[s] - x);
  }
  if (!(gain > 0.0)) return std::numeric_limits<double>::infinity();
  return over / gain;
}

std::vector<double> add_rows(std::vector<double> b, std::span<const double> c,
                             const NonNegMatrix& A,
                             const CapricornParams& params) {
  if (b.size() != A.rows() || c.size() != A.cols()) {
    throw std::invalid_argument("add_rows: shape mismatch");
  }
  const std::vector<double> start = b;
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < c.size(); ++s) {
    if (c[s] > 0.0) support.push_back(s);
  }
  for (std::size_t i = 0; i < A.rows(); ++i) {
    if (start[i] > 0.0) continue;
    // Missing entries of A read as 0 and are excluded by find_row_set.
    const auto a_row = A.row(i);
    const auto cols = find_row_set(c, a_row, params.bucket_size, params.delta);
    if (cols.empty()) continue;
    // Dominated entries can share the bucket and would bias a mean upward.
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t s : cols) alpha = std::min(alpha, a_row[s] / c[s]);
    if (expansion_impact(a_row, c, support, alpha) <= params.theta) b[i] = alpha;
  }
  return b;
}

NonNegMatrix capricorn_residual(const NonNegMatrix& A, const NonNegMatrix& B,
                                const NonNegMatrix& C, std::size_t block) {
  const NonNegMatrix N = maxtimes_product_excluding(B, C, block);
  if (N.rows() != A.rows() || N.cols() != A.cols()) {
    throw std::invalid_argument("capricorn_residual: factor shapes");
  }
  NonNegMatrix R(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      // Rounding in b*c must not leave covered entries in the residual.
      if (A.is_observed(i, j) && N(i, j) < A(i, j) * (1.0 - kCoverTolerance)) {
        R.set(i, j, A(i, j));
      } else {
        R.set_missing(i, j);
      }
    }
  }
  return R;
}

namespace {

Block grow_block(const NonNegMatrix& A, const NonNegMatrix& R,
                 std::size_t seed, const CapricornParams& params) {
  const std::size_t n = R.rows(), m = R.cols();
  Block zero{std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};
  const PatternMatrix H = correlations_with_row(
      R, seed, params.bucket_size, params.delta, params.tau);
  if (H.count() == 0) return zero;

  std::size_t best_row = 0, best_row_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = H.row_count(i);
    if (c > best_row_count) {
      best_row_count = c;
      best_row = i;
    }
  }
  std::size_t best_col = 0, best_col_count = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t c = H.col_count(j);
    if (c > best_col_count) {
      best_col_count = c;
      best_col = j;
    }
  }
  std::vector<std::size_t> b_idx, c_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (H(i, best_col)) b_idx.push_back(i);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (H(best_row, j)) c_idx.push_back(j);
  }

  Block blk =
      recover_block(R, b_idx, c_idx, params.bucket_size, params.delta);
  blk.b = add_rows(std::move(blk.b), blk.c, A, params);
  blk.c = add_rows(std::move(blk.c), blk.b, transpose(A), params);
  return blk;
}

// Drop in L1 error over observed entries when b c is maxed into N.
double l1_gain(const NonNegMatrix& A, const NonNegMatrix& N, const Block& blk) {
  double gain = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    if (!(blk.b[i] > 0.0)) continue;
    for (std::size_t j = 0; j < A.cols(); ++j) {
      const double x = blk.b[i] * blk.c[j];
      if (!(x > N(i, j)) || !A.is_observed(i, j)) continue;
      gain += std::abs(A(i, j) - N(i, j)) - std::abs(A(i, j) - x);
    }
  }
  return gain;
}

// Zeroes rows, then columns, of the block whose entries above N raise the
// L1 error against A.
void prune_block(const NonNegMatrix& A, const NonNegMatrix& N, Block& blk) {
  auto gain_at = [&](std::size_t i, std::size_t j) {
    const double x = blk.b[i] * blk.c[j];
    if (!(x > N(i, j)) || !A.is_observed(i, j)) return 0.0;
    return std::abs(A(i, j) - N(i, j)) - std::abs(A(i, j) - x);
  };
  for (std::size_t i = 0; i < A.rows(); ++i) {
    if (!(blk.b[i] > 0.0)) continue;
    double g = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) g += gain_at(i, j);
    if (g < 0.0) blk.b[i] = 0.0;
  }
  for (std::size_t j = 0; j < A.cols(); ++j) {
    if (!(blk.c[j] > 0.0)) continue;
    double g = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i) g += gain_at(i, j);
    if (g < 0.0) blk.c[j] = 0.0;
  }
}

}  // namespace

CapricornUpdater::CapricornUpdater(CapricornParams params)
    : params_(params) {
  params_.validate();
}

Block CapricornUpdater::update_block(const NonNegMatrix& A,
                                     const NonNegMatrix& B,
                                     const NonNegMatrix& C,
                                     std::size_t count) {
  if (count == 0) throw std::invalid_argument("count must be >= 1");
  if (B.rows() != A.rows() || C.cols() != A.cols() || B.cols() != C.rows() ||
      B.cols() == 0) {
    throw std::invalid_argument("capricorn: factor shapes do not match data");
  }
  const std::size_t n = A.rows(), m = A.cols();
  const std::size_t l = block_index(count, B.cols());
  Block zero{std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};

  const NonNegMatrix R = capricorn_residual(A, B, C, l);

  // Rows by residual mass, heaviest first. A seed whose residual is mostly
  // noise finds a junk block or none, so several seeds are grown and the
  // block that lowers the L1 error most is kept.
  std::vector<std::pair<double, std::size_t>> mass;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = R.row(i);
    const double s = std::accumulate(row.begin(), row.end(), 0.0);
    if (s > 0.0) mass.emplace_back(-s, i);
  }
  std::sort(mass.begin(), mass.end());
  if (mass.size() > kSeedAttempts) mass.resize(kSeedAttempts);

  const NonNegMatrix N = maxtimes_product_excluding(B, C, l);
  Block best = zero;
  double best_gain = 0.0;
  for (const auto& [neg_mass, seed] : mass) {
    Block blk = grow_block(A, R, seed, params_);
    prune_block(A, N, blk);
    const double gain = l1_gain(A, N, blk);
    if (gain > best_gain) {
      best_gain = gain;
      best = std::move(blk);
    }
  }
  return best;
}

}  // namespace subtrop
