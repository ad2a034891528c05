#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "subtrop/oracle.hpp"

using namespace subtrop;

TEST_SUITE("oracle") {

TEST_CASE("grid minimum") {
  const std::vector<double> a{0.4}, n{0.0}, b{1.0};
  const auto g = oracle::grid_min_gamma(a, n, b, ObjectiveKind::kFrobenius, 1001);
  CHECK(std::abs(g.x - 0.4) <= 1.0 / 1000.0);
  const std::vector<double> z{0.0};
  const auto flat = oracle::grid_min_gamma(a, n, z, ObjectiveKind::kFrobenius, 101);
  CHECK(flat.x == 0.0);
  CHECK(flat.error == doctest::Approx(0.16));
}

TEST_CASE("small ranks") {
  NonNegMatrix I(3, 3);
  for (std::size_t i = 0; i < 3; ++i) I.set(i, i, 1.0);
  CHECK(oracle::exhaustive_subtropical_rank_binary(I) == 3);
  CHECK(oracle::exhaustive_subtropical_rank_binary(NonNegMatrix(3, 3, 1.0)) == 1);
  CHECK(oracle::exhaustive_subtropical_rank_binary(NonNegMatrix(3, 3)) == 0);
  CHECK(oracle::exhaustive_boolean_rank(oracle::to_binary(I)) == 3);
  CHECK_THROWS(oracle::to_binary(NonNegMatrix(2, 2, 0.5)));
  CHECK_THROWS(oracle::exhaustive_subtropical_rank_binary(NonNegMatrix(5, 5)));
}

TEST_CASE("sparsity bound") {
  const auto B = NonNegMatrix::from_rows({{1, 0}, {2, 1}, {0, 2}});
  const auto C = NonNegMatrix::from_rows({{1, 2, 0}, {0, 2, 1}});
  const auto chk = oracle::check_sparsity_bound(B, C);
  CHECK(chk.holds);
  CHECK(chk.slack == doctest::Approx(1.0 / 3.0 + 1.0 / 3.0 - 2.0 / 9.0));
  const auto dense = oracle::check_sparsity_bound(NonNegMatrix(3, 2, 0.5),
                                                  NonNegMatrix(2, 4, 0.5));
  CHECK(dense.holds);
  CHECK(dense.slack == 0.0);
  CHECK_THROWS(oracle::check_sparsity_bound(B, C, NonNegMatrix(3, 3)));
}

TEST_CASE("max-plus transfer") {
  using oracle::MaxPlus;
  oracle::MaxPlusMatrix B(2, 1), C(1, 2);
  B.at(0, 0) = MaxPlus::of(0.5);
  B.at(1, 0) = MaxPlus::of(-1.0);
  C.at(0, 0) = MaxPlus::of(0.2);
  C.at(0, 1) = MaxPlus::bot();
  const auto A = oracle::maxplus_product(B, C);
  CHECK(A.at(0, 0).value == doctest::Approx(0.7));
  CHECK(A.at(0, 1).bottom);
  const auto t = oracle::check_maxplus_transfer(A, B, C, 0.0);
  CHECK(t.premise);
  CHECK(t.holds);
  CHECK(t.lhs == doctest::Approx(0.0));

  const oracle::MaxPlusMatrix all_bottom(2, 2);
  const auto E = oracle::exp_matrix(all_bottom);
  CHECK(E == NonNegMatrix(2, 2));
  CHECK(std::isinf(oracle::maxplus_distance_sq(all_bottom, A)));
}

}  // TEST_SUITE
