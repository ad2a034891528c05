#ifndef SUBTROP_ORACLE_HPP_
#define SUBTROP_ORACLE_HPP_

// Brute-force references for the test suite. Nothing here calls into the
// production algorithms; products and costs are recomputed locally.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "subtrop/matrix.hpp"
#include "subtrop/objective.hpp"

namespace subtrop::oracle {

struct GridMin {
  double error = 0.0;
  double x = 0.0;
};

// Evaluates gamma'(x) = Σ φ(a_i, max{n_i, b_i x}) on `grid_points` equispaced
// points of [0, 1] and keeps the lowest (first on ties).
GridMin grid_min_gamma(std::span<const double> a_col,
                       std::span<const double> n_col,
                       std::span<const double> b, ObjectiveKind kind,
                       std::size_t grid_points,
                       std::span<const std::uint8_t> observed = {});

double gamma_direct(std::span<const double> a_col,
                    std::span<const double> n_col, std::span<const double> b,
                    double x, ObjectiveKind kind,
                    std::span<const std::uint8_t> observed = {});

// Row-major binary matrix, entries 0/1.
struct BinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(std::size_t i, std::size_t j) const {
    return bits[i * cols + j];
  }
};

BinaryMatrix to_binary(const NonNegMatrix& A);  // throws unless entries are 0/1
BinaryMatrix boolean_product(const BinaryMatrix& P, const BinaryMatrix& Q);

// Least k with binary B (n x k), C (k x m) and B ⊠ C == A, by enumeration.
// Limited to 4 x 4 inputs.
std::size_t exhaustive_subtropical_rank_binary(const NonNegMatrix& A);

// Boolean rank as the least number of all-ones rectangles covering the ones
// of A. Limited to 4 x 4 inputs.
std::size_t exhaustive_boolean_rank(const BinaryMatrix& A);

struct SparsityCheck {
  bool holds = false;
  double slack = 0.0;  // s(B) + s(C) - s(A)
};

// Checks s(B) + s(C) >= s(A). A defaults to B ⊠ C; a supplied A must
// dominate B ⊠ C, otherwise std::invalid_argument.
SparsityCheck check_sparsity_bound(const NonNegMatrix& B, const NonNegMatrix& C,
                                   const std::optional<NonNegMatrix>& A = {});

// Max-plus scalar with an explicit bottom element standing for -inf.
struct MaxPlus {
  bool bottom = true;
  double value = 0.0;

  static MaxPlus bot() { return {}; }
  static MaxPlus of(double v) { return {false, v}; }
};

struct MaxPlusMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<MaxPlus> entries;

  MaxPlusMatrix() = default;
  MaxPlusMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), entries(r * c) {}
  MaxPlus& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const MaxPlus& at(std::size_t i, std::size_t j) const {
    return entries[i * cols + j];
  }
};

// (B ⊞ C)(i, j) = max_d B(i, d) + C(d, j).
MaxPlusMatrix maxplus_product(const MaxPlusMatrix& B, const MaxPlusMatrix& C);
// Σ (X - Y)^2 with bottom - bottom = 0; +inf if exactly one side is bottom.
double maxplus_distance_sq(const MaxPlusMatrix& X, const MaxPlusMatrix& Y);
// Elementwise exp with exp(bottom) = 0.
NonNegMatrix exp_matrix(const MaxPlusMatrix& X);

struct TransferCheck {
  bool premise = false;  // ||A - B ⊞ C||^2 <= lambda
  bool holds = false;    // premise implies the max-times bound
  double lhs = 0.0;      // ||exp A - exp B ⊠ exp C||_F^2
  double bound = 0.0;    // exp(2 N) lambda
};

TransferCheck check_maxplus_transfer(const MaxPlusMatrix& A,
                                     const MaxPlusMatrix& B,
                                     const MaxPlusMatrix& C, double lambda);

}  // namespace subtrop::oracle

#endif  // SUBTROP_ORACLE_HPP_
