#ifndef SUBTROP_MATRIX_HPP_
#define SUBTROP_MATRIX_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace subtrop {

// Dense row-major matrix of nonnegative reals with an optional
// observed/missing mask. Missing entries carry no value (stored as 0).
//
// Invariant: every observed entry is finite and >= 0. All mutators check it.
class NonNegMatrix {
 public:
  NonNegMatrix() = default;
  NonNegMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Takes ownership of row-major values; throws DataError on a negative or
  // non-finite value and std::invalid_argument on a size mismatch.
  NonNegMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static NonNegMatrix from_rows(
      const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  void set(std::size_t i, std::size_t j, double v);

  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }

  bool has_mask() const { return !mask_.empty(); }
  bool is_observed(std::size_t i, std::size_t j) const {
    return mask_.empty() || mask_[i * cols_ + j] != 0;
  }
  // Marks (i, j) as missing; its stored value becomes 0.
  void set_missing(std::size_t i, std::size_t j);
  // Per-entry flags (1 = observed). Empty when every entry is observed.
  std::span<const std::uint8_t> mask() const { return mask_; }
  std::size_t observed_count() const;

  // Copy of this matrix with every entry marked observed (missing read as 0).
  NonNegMatrix filled() const;

  friend bool operator==(const NonNegMatrix& a, const NonNegMatrix& b);

 private:
  void ensure_mask();

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

// Binary indicator matrix.
class PatternMatrix {
 public:
  PatternMatrix() = default;
  PatternMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool operator()(std::size_t i, std::size_t j) const {
    return bits_[i * cols_ + j] != 0;
  }
  void set(std::size_t i, std::size_t j, bool bit) {
    bits_[i * cols_ + j] = bit ? 1 : 0;
  }
  std::size_t count() const;
  std::size_t row_count(std::size_t i) const;
  std::size_t col_count(std::size_t j) const;

  friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// B (n x k) and C (k x m) with B ⊠ C approximating the input. `scale` is the
// factor the input was divided by before fitting; it has already been
// multiplied back into B.
struct Factorization {
  NonNegMatrix B;
  NonNegMatrix C;
  double scale = 1.0;
  std::string objective_name;

  std::size_t rank() const { return B.cols(); }
};

// (B ⊠ C)(i, j) = max_s B(i, s) * C(s, j). Throws on dimension mismatch or
// masked entries in either factor.
NonNegMatrix maxtimes_product(const NonNegMatrix& B, const NonNegMatrix& C);
NonNegMatrix reconstruct(const Factorization& f);

// Product with block `block` (0-based) left out. The empty product is the
// all-zero matrix.
NonNegMatrix maxtimes_product_excluding(const NonNegMatrix& B,
                                        const NonNegMatrix& C,
                                        std::size_t block);

PatternMatrix pattern(const NonNegMatrix& A);

// True iff X(i,j) >= A(i,j) everywhere in `region` (entries with bit set).
// Without a region, every entry observed in both matrices is checked.
bool dominates(const NonNegMatrix& X, const NonNegMatrix& A,
               const std::optional<PatternMatrix>& region = std::nullopt);

// Fraction of zero entries. Requires a fully observed matrix.
double sparsity(const NonNegMatrix& A);
std::size_t nnz(const NonNegMatrix& A);

NonNegMatrix transpose(const NonNegMatrix& A);

double max_observed(const NonNegMatrix& A);

// Column `s` of B and row `s` of C as plain vectors.
std::vector<double> column_of(const NonNegMatrix& B, std::size_t s);
std::vector<double> row_of(const NonNegMatrix& C, std::size_t s);
void set_column(NonNegMatrix& B, std::size_t s, std::span<const double> v);
void set_row(NonNegMatrix& C, std::size_t s, std::span<const double> v);

}  // namespace subtrop

#endif  // SUBTROP_MATRIX_HPP_
