#include "subtrop/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "subtrop/error.hpp"

namespace subtrop {

namespace {

void check_value(double v, std::size_t i, std::size_t j) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DataError("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") = " + std::to_string(v) +
                    " is not a finite nonnegative number");
  }
}

void require_fully_observed(const NonNegMatrix& A, const char* what) {
  if (A.has_mask()) {
    for (std::size_t i = 0; i < A.rows(); ++i) {
      for (std::size_t j = 0; j < A.cols(); ++j) {
        if (!A.is_observed(i, j)) {
          throw std::invalid_argument(std::string(what) +
                                      ": matrix has missing entries");
        }
      }
    }
  }
}

}  // namespace

NonNegMatrix::NonNegMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {
  if (rows * cols > 0) check_value(fill, 0, 0);
}

NonNegMatrix::NonNegMatrix(std::size_t rows, std::size_t cols,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("NonNegMatrix: value count " +
                                std::to_string(values_.size()) +
                                " does not match " + std::to_string(rows) +
                                "x" + std::to_string(cols));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    check_value(values_[k], k / std::max<std::size_t>(cols, 1),
                k % std::max<std::size_t>(cols, 1));
  }
}

NonNegMatrix NonNegMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.front().size();
  std::vector<double> values;
  values.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw std::invalid_argument("from_rows: ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return NonNegMatrix(n, m, std::move(values));
}

void NonNegMatrix::set(std::size_t i, std::size_t j, double v) {
  check_value(v, i, j);
  values_[i * cols_ + j] = v;
  if (!mask_.empty()) mask_[i * cols_ + j] = 1;
}

void NonNegMatrix::ensure_mask() {
  if (mask_.empty()) mask_.assign(values_.size(), 1);
}

void NonNegMatrix::set_missing(std::size_t i, std::size_t j) {
  ensure_mask();
  mask_[i * cols_ + j] = 0;
  values_[i * cols_ + j] = 0.0;
}

std::size_t NonNegMatrix::observed_count() const {
  if (mask_.empty()) return values_.size();
  return static_cast<std::size_t>(
      std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

NonNegMatrix NonNegMatrix::filled() const {
  NonNegMatrix out;
  out.rows_ = rows_;
  out.cols_ = cols_;
  out.values_ = values_;
  return out;
}

bool operator==(const NonNegMatrix& a, const NonNegMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t k = 0; k < a.values_.size(); ++k) {
    const bool oa = a.mask_.empty() || a.mask_[k];
    const bool ob = b.mask_.empty() || b.mask_[k];
    if (oa != ob) return false;
    if (oa && a.values_[k] != b.values_[k]) return false;
  }
  return true;
}

std::size_t PatternMatrix::count() const {
  return static_cast<std::size_t>(
      std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t PatternMatrix::row_count(std::size_t i) const {
  std::size_t c = 0;
  for (std::size_t j = 0; j < cols_; ++j) c += bits_[i * cols_ + j];
  return c;
}

std::size_t PatternMatrix::col_count(std::size_t j) const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < rows_; ++i) c += bits_[i * cols_ + j];
  return c;
}

namespace {

NonNegMatrix product_impl(const NonNegMatrix& B, const NonNegMatrix& C,
                          std::optional<std::size_t> skip) {
  if (B.cols() != C.rows()) {
    throw std::invalid_argument(
        "maxtimes_product: inner dimensions differ (" +
        std::to_string(B.cols()) + " vs " + std::to_string(C.rows()) + ")");
  }
  require_fully_observed(B, "maxtimes_product");
  require_fully_observed(C, "maxtimes_product");
  const std::size_t n = B.rows(), m = C.cols(), k = B.cols();
  std::vector<double> out(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = out.data() + i * m;
    for (std::size_t s = 0; s < k; ++s) {
      if (skip && *skip == s) continue;
      const double b = B(i, s);
      if (b == 0.0) continue;
      const auto c = C.row(s);
      for (std::size_t j = 0; j < m; ++j) {
        dst[j] = std::max(dst[j], b * c[j]);
      }
    }
  }
  return NonNegMatrix(n, m, std::move(out));
}

}  // namespace

NonNegMatrix maxtimes_product(const NonNegMatrix& B, const NonNegMatrix& C) {
  return product_impl(B, C, std::nullopt);
}

NonNegMatrix reconstruct(const Factorization& f) {
  return maxtimes_product(f.B, f.C);
}

NonNegMatrix maxtimes_product_excluding(const NonNegMatrix& B,
                                        const NonNegMatrix& C,
                                        std::size_t block) {
  if (block >= B.cols()) {
    throw std::out_of_range("maxtimes_product_excluding: block " +
                            std::to_string(block) + " out of range for rank " +
                            std::to_string(B.cols()));
  }
  return product_impl(B, C, block);
}

PatternMatrix pattern(const NonNegMatrix& A) {
  require_fully_observed(A, "pattern");
  PatternMatrix P(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) P.set(i, j, A(i, j) > 0.0);
  }
  return P;
}

bool dominates(const NonNegMatrix& X, const NonNegMatrix& A,
               const std::optional<PatternMatrix>& region) {
  if (X.rows() != A.rows() || X.cols() != A.cols()) {
    throw std::invalid_argument("dominates: shape mismatch");
  }
  if (region && (region->rows() != A.rows() || region->cols() != A.cols())) {
    throw std::invalid_argument("dominates: region shape mismatch");
  }
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      const bool in_region = region ? (*region)(i, j)
                                    : X.is_observed(i, j) && A.is_observed(i, j);
      if (in_region && X(i, j) < A(i, j)) return false;
    }
  }
  return true;
}

std::size_t nnz(const NonNegMatrix& A) {
  require_fully_observed(A, "nnz");
  return static_cast<std::size_t>(std::count_if(
      A.values().begin(), A.values().end(), [](double v) { return v != 0.0; }));
}

double sparsity(const NonNegMatrix& A) {
  if (A.size() == 0) throw std::invalid_argument("sparsity: empty matrix");
  const double total = static_cast<double>(A.size());
  return (total - static_cast<double>(nnz(A))) / total;
}

NonNegMatrix transpose(const NonNegMatrix& A) {
  NonNegMatrix T(A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (A.is_observed(i, j)) {
        T.set(j, i, A(i, j));
      } else {
        T.set_missing(j, i);
      }
    }
  }
  return T;
}

double max_observed(const NonNegMatrix& A) {
  double best = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (A.is_observed(i, j)) best = std::max(best, A(i, j));
    }
  }
  return best;
}

std::vector<double> column_of(const NonNegMatrix& B, std::size_t s) {
  std::vector<double> v(B.rows());
  for (std::size_t i = 0; i < B.rows(); ++i) v[i] = B(i, s);
  return v;
}

std::vector<double> row_of(const NonNegMatrix& C, std::size_t s) {
  const auto r = C.row(s);
  return {r.begin(), r.end()};
}

void set_column(NonNegMatrix& B, std::size_t s, std::span<const double> v) {
  if (v.size() != B.rows()) throw std::invalid_argument("set_column: size");
  for (std::size_t i = 0; i < B.rows(); ++i) B.set(i, s, v[i]);
}

void set_row(NonNegMatrix& C, std::size_t s, std::span<const double> v) {
  if (v.size() != C.cols()) throw std::invalid_argument("set_row: size");
  for (std::size_t j = 0; j < C.cols(); ++j) C.set(s, j, v[j]);
}

}  // namespace subtrop
