#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "subtrop/error.hpp"
#include "subtrop/matrix.hpp"

using namespace subtrop;

TEST_SUITE("matrix") {

TEST_CASE("max-times product of a small rank-2 example") {
  const auto B = NonNegMatrix::from_rows({{1, 0}, {2, 1}, {0, 2}});
  const auto C = NonNegMatrix::from_rows({{1, 2, 0}, {0, 2, 1}});
  CHECK(maxtimes_product(B, C) ==
        NonNegMatrix::from_rows({{1, 2, 0}, {2, 4, 1}, {0, 4, 2}}));
}

TEST_CASE("identity left factor returns C") {
  const auto I = NonNegMatrix::from_rows({{1, 0}, {0, 1}});
  const auto C = NonNegMatrix::from_rows({{0.3, 0, 7}, {2, 0.5, 0}});
  CHECK(maxtimes_product(I, C) == C);
}

TEST_CASE("entrywise maximum of products") {
  const auto B = NonNegMatrix::from_rows({{1, 0.5}, {0, 2}});
  const auto C = NonNegMatrix::from_rows({{0.2, 1}, {1, 0.4}});
  const auto P = maxtimes_product(B, C);
  CHECK(P(0, 0) == doctest::Approx(0.5));
  CHECK(P(0, 1) == doctest::Approx(1.0));
  CHECK(P(1, 0) == doctest::Approx(2.0));
  CHECK(P(1, 1) == doctest::Approx(0.8));
}

TEST_CASE("product rejects mismatched shapes and masked factors") {
  NonNegMatrix B(2, 3), C(2, 2);
  CHECK_THROWS(maxtimes_product(B, C));
  NonNegMatrix B2(2, 2);
  B2.set_missing(0, 0);
  CHECK_THROWS(maxtimes_product(B2, C));
}

TEST_CASE("product agrees with a naive triple loop") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto B = testing::random_matrix(7, 4, 0.6, rng);
    const auto C = testing::random_matrix(4, 9, 0.6, rng);
    CHECK(testing::max_abs_diff(maxtimes_product(B, C),
                                testing::naive_maxtimes(B, C)) == 0.0);
  }
}

TEST_CASE("excluding a block") {
  SUBCASE("rank one leaves the zero matrix") {
    const auto B = NonNegMatrix::from_rows({{1}, {2}});
    const auto C = NonNegMatrix::from_rows({{3, 4}});
    CHECK(maxtimes_product_excluding(B, C, 0) == NonNegMatrix(2, 2));
  }
  SUBCASE("second block of the small example") {
    const auto B = NonNegMatrix::from_rows({{1, 0}, {2, 1}, {0, 2}});
    const auto C = NonNegMatrix::from_rows({{1, 2, 0}, {0, 2, 1}});
    CHECK(maxtimes_product_excluding(B, C, 1) ==
          NonNegMatrix::from_rows({{1, 2, 0}, {2, 4, 0}, {0, 0, 0}}));
  }
  SUBCASE("matches an explicit deletion") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      const auto B = testing::random_matrix(4, 3, 0.8, rng);
      const auto C = testing::random_matrix(3, 3, 0.8, rng);
      for (std::size_t l = 0; l < 3; ++l) {
        NonNegMatrix Bd(4, 2), Cd(2, 3);
        std::size_t t = 0;
        for (std::size_t s = 0; s < 3; ++s) {
          if (s == l) continue;
          for (std::size_t i = 0; i < 4; ++i) Bd.set(i, t, B(i, s));
          for (std::size_t j = 0; j < 3; ++j) Cd.set(t, j, C(s, j));
          ++t;
        }
        CHECK(maxtimes_product_excluding(B, C, l) ==
              testing::naive_maxtimes(Bd, Cd));
      }
    }
  }
  SUBCASE("out of range block") {
    NonNegMatrix B(2, 2), C(2, 2);
    CHECK_THROWS(maxtimes_product_excluding(B, C, 2));
  }
}

TEST_CASE("pattern, sparsity, nnz, transpose") {
  const auto A = NonNegMatrix::from_rows({{0, 2}, {3, 0}});
  PatternMatrix P(2, 2);
  P.set(0, 1, true);
  P.set(1, 0, true);
  CHECK(pattern(A) == P);
  CHECK(pattern(NonNegMatrix(2, 3)) == PatternMatrix(2, 3));
  CHECK(sparsity(NonNegMatrix::from_rows({{0, 1}, {1, 1}})) ==
        doctest::Approx(0.25));
  CHECK(sparsity(NonNegMatrix(3, 3)) == 1.0);
  CHECK(sparsity(NonNegMatrix(3, 3, 0.5)) == 0.0);
  CHECK(nnz(A) == 2);
  CHECK(transpose(NonNegMatrix::from_rows({{1, 2}})) ==
        NonNegMatrix::from_rows({{1}, {2}}));
  NonNegMatrix masked = A;
  masked.set_missing(0, 0);
  CHECK_THROWS(pattern(masked));
}

TEST_CASE("dominance with and without a region") {
  const auto A = NonNegMatrix::from_rows({{1, 2}, {3, 4}});
  CHECK(dominates(A, A));
  auto X = A;
  X.set(1, 1, 4 - 1e-9);
  CHECK_FALSE(dominates(X, A));
  PatternMatrix region(2, 2);
  region.set(0, 0, true);
  region.set(0, 1, true);
  region.set(1, 0, true);
  CHECK(dominates(X, A, region));
  CHECK_THROWS(dominates(NonNegMatrix(2, 3), A));
}

TEST_CASE("construction rejects negative and non-finite values") {
  CHECK_THROWS_AS(NonNegMatrix(1, 2, std::vector<double>{1.0, -1.0}), DataError);
  CHECK_THROWS_AS(
      NonNegMatrix(1, 1,
                   std::vector<double>{std::numeric_limits<double>::infinity()}),
      DataError);
  NonNegMatrix M(1, 1);
  CHECK_THROWS(M.set(0, 0, -0.5));
  CHECK_THROWS(NonNegMatrix(2, 2, std::vector<double>{1.0}));
}

TEST_CASE("missing entries") {
  NonNegMatrix M(2, 2, 1.0);
  M.set_missing(1, 0);
  CHECK_FALSE(M.is_observed(1, 0));
  CHECK(M(1, 0) == 0.0);
  CHECK(M.observed_count() == 3);
  CHECK(M.filled().is_observed(1, 0));
}

}  // TEST_SUITE
