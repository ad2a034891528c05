#include "subtrop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subtrop::oracle {

namespace {

double cost(ObjectiveKind kind, double a, double r) {
  switch (kind) {
    case ObjectiveKind::kL1:
      return a > r ? a - r : r - a;
    case ObjectiveKind::kJensenShannon: {
      const double m = 0.5 * (a + r);
      double out = 0.0;
      if (a > 0.0) out += a * (std::log(a) - std::log(m));
      if (r > 0.0) out += r * (std::log(r) - std::log(m));
      return std::max(out, 0.0);
    }
    case ObjectiveKind::kFrobenius:
    default: {
      const double d = a - r;
      return d * d;
    }
  }
}

constexpr std::size_t kMaxDim = 4;

void check_small(std::size_t n, std::size_t m) {
  if (n > kMaxDim || m > kMaxDim) {
    throw std::invalid_argument("exhaustive rank search is limited to 4 x 4");
  }
}

}  // namespace

double gamma_direct(std::span<const double> a_col,
                    std::span<const double> n_col, std::span<const double> b,
                    double x, ObjectiveKind kind,
                    std::span<const std::uint8_t> observed) {
  double total = 0.0;
  for (std::size_t i = 0; i < a_col.size(); ++i) {
    if (!observed.empty() && !observed[i]) continue;
    const double r = b[i] * x > n_col[i] ? b[i] * x : n_col[i];
    total += cost(kind, a_col[i], r);
  }
  return total;
}

GridMin grid_min_gamma(std::span<const double> a_col,
                       std::span<const double> n_col,
                       std::span<const double> b, ObjectiveKind kind,
                       std::size_t grid_points,
                       std::span<const std::uint8_t> observed) {
  if (grid_points < 2) throw std::invalid_argument("grid needs >= 2 points");
  GridMin best{std::numeric_limits<double>::infinity(), 0.0};
  const double step = 1.0 / static_cast<double>(grid_points - 1);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = static_cast<double>(g) * step;
    const double e = gamma_direct(a_col, n_col, b, x, kind, observed);
    if (e < best.error) best = {e, x};
  }
  return best;
}

BinaryMatrix to_binary(const NonNegMatrix& A) {
  BinaryMatrix out{A.rows(), A.cols(), std::vector<std::uint8_t>(A.size())};
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      const double v = A(i, j);
      if (!A.is_observed(i, j) || (v != 0.0 && v != 1.0)) {
        throw std::invalid_argument("matrix is not binary");
      }
      out.bits[i * A.cols() + j] = v == 1.0;
    }
  }
  return out;
}

BinaryMatrix boolean_product(const BinaryMatrix& P, const BinaryMatrix& Q) {
  if (P.cols != Q.rows) throw std::invalid_argument("boolean_product shapes");
  BinaryMatrix out{P.rows, Q.cols, std::vector<std::uint8_t>(P.rows * Q.cols)};
  for (std::size_t i = 0; i < P.rows; ++i) {
    for (std::size_t j = 0; j < Q.cols; ++j) {
      bool any = false;
      for (std::size_t s = 0; s < P.cols && !any; ++s) {
        any = P.at(i, s) && Q.at(s, j);
      }
      out.bits[i * Q.cols + j] = any;
    }
  }
  return out;
}

std::size_t exhaustive_subtropical_rank_binary(const NonNegMatrix& A) {
  const std::size_t n = A.rows(), m = A.cols();
  check_small(n, m);
  const BinaryMatrix bin = to_binary(A);
  if (std::none_of(bin.bits.begin(), bin.bits.end(),
                   [](std::uint8_t v) { return v != 0; })) {
    return 0;
  }

  for (std::size_t k = 1; k <= std::min(n, m); ++k) {
    const std::uint64_t c_space = std::uint64_t{1} << (k * m);
    for (std::uint64_t cbits = 0; cbits < c_space; ++cbits) {
      auto c_at = [&](std::size_t s, std::size_t j) {
        return static_cast<double>((cbits >> (s * m + j)) & 1u);
      };
      // Rows of B are independent, so each row is searched on its own.
      bool all_rows = true;
      for (std::size_t i = 0; i < n && all_rows; ++i) {
        bool found = false;
        for (std::uint64_t brow = 0; brow < (std::uint64_t{1} << k) && !found;
             ++brow) {
          bool equal = true;
          for (std::size_t j = 0; j < m && equal; ++j) {
            double r = 0.0;
            for (std::size_t s = 0; s < k; ++s) {
              r = std::max(r, static_cast<double>((brow >> s) & 1u) * c_at(s, j));
            }
            equal = r == A(i, j);
          }
          found = equal;
        }
        all_rows = found;
      }
      if (all_rows) return k;
    }
  }
  throw std::logic_error("no binary factorization found up to min(n, m)");
}

namespace {

struct Rect {
  unsigned rows = 0;  // bitmask
  unsigned cols = 0;
};

bool cover(const BinaryMatrix& A, const std::vector<Rect>& rects,
           std::vector<std::uint8_t>& covered, std::size_t budget) {
  std::size_t first = A.bits.size();
  for (std::size_t p = 0; p < A.bits.size(); ++p) {
    if (A.bits[p] && !covered[p]) {
      first = p;
      break;
    }
  }
  if (first == A.bits.size()) return true;
  if (budget == 0) return false;
  const std::size_t fi = first / A.cols, fj = first % A.cols;
  for (const Rect& r : rects) {
    if (!((r.rows >> fi) & 1u) || !((r.cols >> fj) & 1u)) continue;
    std::vector<std::uint8_t> next = covered;
    for (std::size_t i = 0; i < A.rows; ++i) {
      for (std::size_t j = 0; j < A.cols; ++j) {
        if (((r.rows >> i) & 1u) && ((r.cols >> j) & 1u)) {
          next[i * A.cols + j] = 1;
        }
      }
    }
    if (cover(A, rects, next, budget - 1)) return true;
  }
  return false;
}

}  // namespace

std::size_t exhaustive_boolean_rank(const BinaryMatrix& A) {
  check_small(A.rows, A.cols);
  // Maximal all-ones rectangles: every column set S paired with the rows
  // containing S, then closed on columns.
  std::vector<Rect> rects;
  for (unsigned s = 1; s < (1u << A.cols); ++s) {
    unsigned rows = 0;
    for (std::size_t i = 0; i < A.rows; ++i) {
      bool contains = true;
      for (std::size_t j = 0; j < A.cols; ++j) {
        if (((s >> j) & 1u) && !A.at(i, j)) contains = false;
      }
      if (contains) rows |= 1u << i;
    }
    if (rows == 0) continue;
    unsigned cols = 0;
    for (std::size_t j = 0; j < A.cols; ++j) {
      bool all = true;
      for (std::size_t i = 0; i < A.rows; ++i) {
        if (((rows >> i) & 1u) && !A.at(i, j)) all = false;
      }
      if (all) cols |= 1u << j;
    }
    const bool seen = std::any_of(rects.begin(), rects.end(), [&](const Rect& r) {
      return r.rows == rows && r.cols == cols;
    });
    if (!seen) rects.push_back({rows, cols});
  }
  for (std::size_t k = 0;; ++k) {
    std::vector<std::uint8_t> covered(A.bits.size(), 0);
    if (cover(A, rects, covered, k)) return k;
  }
}

SparsityCheck check_sparsity_bound(const NonNegMatrix& B, const NonNegMatrix& C,
                                   const std::optional<NonNegMatrix>& A) {
  if (B.cols() != C.rows()) throw std::invalid_argument("factor shapes");
  const std::size_t n = B.rows(), k = B.cols(), m = C.cols();
  std::vector<double> prod(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t s = 0; s < k; ++s) {
        prod[i * m + j] = std::max(prod[i * m + j], B(i, s) * C(s, j));
      }
    }
  }
  auto zero_fraction = [](std::size_t zeros, std::size_t total) {
    return static_cast<double>(zeros) / static_cast<double>(total);
  };
  std::size_t zb = 0, zc = 0, za = 0;
  for (double v : B.values()) zb += v == 0.0;
  for (double v : C.values()) zc += v == 0.0;
  if (A) {
    if (A->rows() != n || A->cols() != m) {
      throw std::invalid_argument("A has the wrong shape");
    }
    for (std::size_t p = 0; p < n * m; ++p) {
      if (A->values()[p] < prod[p]) {
        throw std::invalid_argument("A does not dominate B ⊠ C");
      }
      za += A->values()[p] == 0.0;
    }
  } else {
    for (double v : prod) za += v == 0.0;
  }
  SparsityCheck out;
  out.slack = zero_fraction(zb, n * k) + zero_fraction(zc, k * m) -
              zero_fraction(za, n * m);
  out.holds = out.slack >= 0.0;
  return out;
}

MaxPlusMatrix maxplus_product(const MaxPlusMatrix& B, const MaxPlusMatrix& C) {
  if (B.cols != C.rows) throw std::invalid_argument("maxplus_product shapes");
  MaxPlusMatrix out(B.rows, C.cols);
  for (std::size_t i = 0; i < B.rows; ++i) {
    for (std::size_t j = 0; j < C.cols; ++j) {
      MaxPlus acc = MaxPlus::bot();
      for (std::size_t d = 0; d < B.cols; ++d) {
        const MaxPlus& x = B.at(i, d);
        const MaxPlus& y = C.at(d, j);
        if (x.bottom || y.bottom) continue;
        const double v = x.value + y.value;
        if (acc.bottom || v > acc.value) acc = MaxPlus::of(v);
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

double maxplus_distance_sq(const MaxPlusMatrix& X, const MaxPlusMatrix& Y) {
  if (X.rows != Y.rows || X.cols != Y.cols) {
    throw std::invalid_argument("maxplus_distance_sq shapes");
  }
  double total = 0.0;
  for (std::size_t p = 0; p < X.entries.size(); ++p) {
    const MaxPlus& x = X.entries[p];
    const MaxPlus& y = Y.entries[p];
    if (x.bottom && y.bottom) continue;
    if (x.bottom || y.bottom) return std::numeric_limits<double>::infinity();
    total += (x.value - y.value) * (x.value - y.value);
  }
  return total;
}

NonNegMatrix exp_matrix(const MaxPlusMatrix& X) {
  NonNegMatrix out(X.rows, X.cols);
  for (std::size_t i = 0; i < X.rows; ++i) {
    for (std::size_t j = 0; j < X.cols; ++j) {
      const MaxPlus& x = X.at(i, j);
      out.set(i, j, x.bottom ? 0.0 : std::exp(x.value));
    }
  }
  return out;
}

TransferCheck check_maxplus_transfer(const MaxPlusMatrix& A,
                                     const MaxPlusMatrix& B,
                                     const MaxPlusMatrix& C, double lambda) {
  const MaxPlusMatrix P = maxplus_product(B, C);
  TransferCheck out;
  out.premise = maxplus_distance_sq(A, P) <= lambda;

  bool any = false;
  double top = 0.0;
  for (std::size_t p = 0; p < A.entries.size(); ++p) {
    for (const MaxPlus* v : {&A.entries[p], &P.entries[p]}) {
      if (v->bottom) continue;
      top = any ? std::max(top, v->value) : v->value;
      any = true;
    }
  }

  // Max-times side computed from exponentiated factors directly.
  const NonNegMatrix eA = exp_matrix(A), eB = exp_matrix(B), eC = exp_matrix(C);
  double lhs = 0.0;
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) {
      double r = 0.0;
      for (std::size_t d = 0; d < B.cols; ++d) r = std::max(r, eB(i, d) * eC(d, j));
      lhs += (eA(i, j) - r) * (eA(i, j) - r);
    }
  }
  out.lhs = lhs;
  out.bound = any ? std::exp(2.0 * top) * lambda : 0.0;
  // Slack for rounding in exp and the squared sums, relative to the bound and
  // to the size of the entries.
  double scale = 0.0;
  for (double v : eA.values()) scale += v * v;
  const double tol = 1e-9 * out.bound + 1e-12 * scale;
  out.holds = !out.premise || out.lhs <= out.bound + tol;
  return out;
}

}  // namespace subtrop::oracle
