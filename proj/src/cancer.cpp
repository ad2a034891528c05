#include "subtrop/cancer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "subtrop/error.hpp"

namespace subtrop {

void CancerParams::validate() const {
  if (max_degree <= 2) throw UsageError("max degree t must be > 2");
  if (!(update_fraction > 0.0 && update_fraction < 1.0)) {
    throw UsageError("update fraction f must be in (0, 1)");
  }
}

int cancer_degree(std::size_t count, std::size_t rank, int max_degree) {
  if (count == 0 || rank == 0 || max_degree <= 0) {
    throw std::invalid_argument("cancer_degree: bad arguments");
  }
  const std::size_t cycle = (count - 1) / rank;
  return 2 + static_cast<int>(cycle % static_cast<std::size_t>(max_degree));
}

std::size_t cancer_inner_iterations(std::size_t n, std::size_t m, double f) {
  const double iters = std::floor(f * static_cast<double>(n + m) / 2.0);
  return std::max<std::size_t>(1, static_cast<std::size_t>(iters));
}

namespace {

struct ColumnMoves {
  std::vector<double> x;     // surrogate minimizer per column
  std::vector<double> gain;  // exact error drop when c_j = x_j; 0 if fixed
};

ColumnMoves column_moves(const NonNegMatrix& A, const NonNegMatrix& N,
                         std::span<const double> b,
                         std::span<const double> c,
                         const SurrogateMinimizer& minimizer,
                         const AdditiveObjective& obj) {
  const std::size_t n = A.rows(), m = A.cols();
  if (N.rows() != n || N.cols() != m || b.size() != n || c.size() != m) {
    throw std::invalid_argument("cancer: shape mismatch");
  }
  const auto xs = minimizer.abscissae();
  const std::size_t S = xs.size();

  // Per column: current error, error at each sample, the part of gamma'
  // independent of x, and whether any observed row has b_i > 0.
  std::vector<double> base(m, 0.0), constant(m, 0.0), samples(m * S, 0.0);
  std::vector<std::uint8_t> varies(m, 0);

  obj.visit([&](auto cost) {
    for (std::size_t i = 0; i < n; ++i) {
      const double bi = b[i];
      const auto a_row = A.row(i);
      const auto n_row = N.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        if (!A.is_observed(i, j)) continue;
        const double a = a_row[j], nn = n_row[j];
        base[j] += cost(a, std::max(nn, bi * c[j]));
        if (bi == 0.0) {
          constant[j] += cost(a, nn);
          continue;
        }
        varies[j] = 1;
        double* acc = samples.data() + j * S;
        for (std::size_t s = 0; s < S; ++s) {
          acc[s] += cost(a, std::max(nn, bi * xs[s]));
        }
      }
    }
  });

  std::vector<double> xstar(m, 0.0);
  std::vector<double> ys(S);
  for (std::size_t j = 0; j < m; ++j) {
    if (!varies[j]) continue;
    for (std::size_t s = 0; s < S; ++s) ys[s] = samples[j * S + s] + constant[j];
    xstar[j] = minimizer.minimize(ys).x;
  }

  // The surrogate can be far off at high degree, so candidates are ranked by
  // the exact column error at the surrogate's minimizer.
  std::vector<double> exact(constant);
  obj.visit([&](auto cost) {
    for (std::size_t i = 0; i < n; ++i) {
      const double bi = b[i];
      if (bi == 0.0) continue;
      const auto a_row = A.row(i);
      const auto n_row = N.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        if (!A.is_observed(i, j)) continue;
        exact[j] += cost(a_row[j], std::max(n_row[j], bi * xstar[j]));
      }
    }
  });

  // Sample values are exact already; one of them may beat the surrogate.
  for (std::size_t j = 0; j < m; ++j) {
    if (!varies[j]) continue;
    for (std::size_t s = 0; s < S; ++s) {
      const double v = samples[j * S + s] + constant[j];
      if (v < exact[j]) {
        exact[j] = v;
        xstar[j] = xs[s];
      }
    }
  }

  ColumnMoves out{std::move(xstar), std::vector<double>(m, 0.0)};
  for (std::size_t j = 0; j < m; ++j) {
    if (varies[j]) out.gain[j] = base[j] - exact[j];
  }
  return out;
}

}  // namespace

std::vector<double> adjust_one_element(const NonNegMatrix& A,
                                       const NonNegMatrix& N,
                                       std::span<const double> b,
                                       std::vector<double> c,
                                       const SurrogateMinimizer& minimizer,
                                       const AdditiveObjective& obj) {
  const ColumnMoves mv = column_moves(A, N, b, c, minimizer, obj);
  std::size_t best_j = c.size();
  double best_gain = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (mv.gain[j] > best_gain) {
      best_gain = mv.gain[j];
      best_j = j;
    }
  }
  if (best_j < c.size()) c[best_j] = mv.x[best_j];
  return c;
}

Block seed_block(const NonNegMatrix& A, const NonNegMatrix& N,
                 const AdditiveObjective& obj) {
  const std::size_t n = A.rows(), m = A.cols();
  Block blk{std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};
  std::size_t seed = 0;
  double seed_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double uncovered = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (A.is_observed(i, j) && A(i, j) > N(i, j)) {
        uncovered += obj.cost(A(i, j), N(i, j));
      }
    }
    if (uncovered > seed_cost) {
      seed_cost = uncovered;
      seed = i;
    }
  }
  if (seed_cost <= 0.0) return blk;

  auto uncovered = [&](std::size_t i, std::size_t j) {
    return A.is_observed(i, j) && A(i, j) > N(i, j) ? A(i, j) : 0.0;
  };
  // Cross through the seed row's largest uncovered entry (seed, q): c is the
  // seed row scaled so c_q = 1, b is column q.
  std::size_t q = 0;
  for (std::size_t j = 1; j < m; ++j) {
    if (uncovered(seed, j) > uncovered(seed, q)) q = j;
  }
  const double pivot = uncovered(seed, q);
  for (std::size_t j = 0; j < m; ++j) blk.c[j] = uncovered(seed, j) / pivot;
  for (std::size_t i = 0; i < n; ++i) blk.b[i] = uncovered(i, q);

  // Rows, then columns, of the cross that make the error worse are dropped.
  auto gain_at = [&](std::size_t i, std::size_t j) {
    const double x = blk.b[i] * blk.c[j];
    if (!(x > N(i, j)) || !A.is_observed(i, j)) return 0.0;
    return obj.cost(A(i, j), N(i, j)) - obj.cost(A(i, j), x);
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (i == seed || !(blk.b[i] > 0.0)) continue;
    double g = 0.0;
    for (std::size_t j = 0; j < m; ++j) g += gain_at(i, j);
    if (g < 0.0) blk.b[i] = 0.0;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (j == q || !(blk.c[j] > 0.0)) continue;
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) g += gain_at(i, j);
    if (g < 0.0) blk.c[j] = 0.0;
  }
  return blk;
}

CancerUpdater::CancerUpdater(CancerParams params, AdditiveObjective obj)
    : params_(params), obj_(obj) {
  params_.validate();
}

const SurrogateMinimizer& CancerUpdater::minimizer_for(int degree,
                                                       std::size_t count) {
  if (params_.random_abscissae) {
    scratch_.clear();
    scratch_.emplace_back(
        degree, random_abscissae(degree, params_.seed * 1000003u + count));
    return scratch_.back();
  }
  auto it = cache_.find(degree);
  if (it == cache_.end()) {
    it = cache_.emplace(degree, SurrogateMinimizer::equispaced(degree)).first;
  }
  return it->second;
}

Block CancerUpdater::update_block(const NonNegMatrix& A, const NonNegMatrix& B,
                                  const NonNegMatrix& C, std::size_t count) {
  if (count == 0) throw std::invalid_argument("count must be >= 1");
  if (B.rows() != A.rows() || C.cols() != A.cols() || B.cols() != C.rows() ||
      B.cols() == 0) {
    throw std::invalid_argument("cancer: factor shapes do not match data");
  }
  const std::size_t n = A.rows(), m = A.cols(), k = B.cols();
  const std::size_t l = block_index(count, k);
  const NonNegMatrix N = maxtimes_product_excluding(B, C, l);

  Block blk{column_of(B, l), row_of(C, l)};
  const bool b_zero =
      std::all_of(blk.b.begin(), blk.b.end(), [](double v) { return v == 0.0; });
  const bool c_zero =
      std::all_of(blk.c.begin(), blk.c.end(), [](double v) { return v == 0.0; });
  if (b_zero || c_zero) {
    blk = seed_block(A, N, obj_);
    if (std::all_of(blk.c.begin(), blk.c.end(),
                    [](double v) { return v == 0.0; })) {
      return blk;
    }
  }

  const std::size_t niters =
      cancer_inner_iterations(n, m, params_.update_fraction);
  const int degree = cancer_degree(count, k, params_.max_degree);
  const SurrogateMinimizer& minimizer = minimizer_for(degree, count);
  const NonNegMatrix At = transpose(A);
  const NonNegMatrix Nt = transpose(N);
  for (std::size_t it = 0; it < niters; ++it) {
    blk.c = adjust_one_element(A, N, blk.b, std::move(blk.c), minimizer, obj_);
    blk.b = adjust_one_element(At, Nt, blk.c, std::move(blk.b), minimizer, obj_);
  }
  return blk;
}

}  // namespace subtrop
