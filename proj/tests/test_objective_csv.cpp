#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "subtrop/csv.hpp"
#include "subtrop/error.hpp"
#include "subtrop/objective.hpp"

using namespace subtrop;

TEST_SUITE("objective") {

TEST_CASE("per-element costs") {
  CHECK(phi::frobenius(2, 5) == 9.0);
  CHECK(phi::l1(2, 5) == 3.0);
  CHECK(phi::jensen_shannon(0.7, 0.7) == 0.0);
  CHECK(phi::jensen_shannon(1, 0) == doctest::Approx(std::log(2.0)));
  CHECK(phi::jensen_shannon(0.3, 1.7) ==
        doctest::Approx(phi::jensen_shannon(1.7, 0.3)));
  CHECK_THROWS(jensen_shannon().cost(-1.0, 1.0));
}

TEST_CASE("evaluate over observed entries") {
  const auto A = NonNegMatrix::from_rows({{1, 2}});
  CHECK(evaluate(frobenius_sq(), A, NonNegMatrix::from_rows({{1, 4}})) == 4.0);
  for (auto obj : {frobenius_sq(), l1(), jensen_shannon()}) {
    CHECK(evaluate(obj, A, A) == 0.0);
  }
  NonNegMatrix M = A;
  M.set_missing(0, 1);
  CHECK(evaluate(l1(), M, NonNegMatrix::from_rows({{3, 7}})) == 2.0);
  CHECK_THROWS(evaluate(l1(), A, NonNegMatrix(2, 1)));
}

TEST_CASE("relative Frobenius error") {
  const auto A = NonNegMatrix::from_rows({{3, 4}});
  CHECK(relative_frobenius(A, A) == 0.0);
  CHECK(relative_frobenius(A, NonNegMatrix(1, 2)) == doctest::Approx(1.0));
  CHECK(relative_frobenius(A, NonNegMatrix::from_rows({{3, 0}})) ==
        doctest::Approx(0.8));
  CHECK_THROWS(relative_frobenius(NonNegMatrix(1, 2), NonNegMatrix(1, 2)));
}

TEST_CASE("objective names") {
  CHECK(objective_from_name("frobenius").kind() == ObjectiveKind::kFrobenius);
  CHECK(objective_from_name("l1").kind() == ObjectiveKind::kL1);
  CHECK(objective_from_name("js").kind() == ObjectiveKind::kJensenShannon);
  CHECK_THROWS(objective_from_name("kl"));
}

}  // TEST_SUITE

TEST_SUITE("csv") {

TEST_CASE("parse with missing entries and header") {
  std::istringstream in("a,b,c\n1,2.5,NaN\n0,nan,3\n");
  const auto A = parse_csv(in, true);
  CHECK(A.rows() == 2);
  CHECK(A.cols() == 3);
  CHECK(A(0, 1) == 2.5);
  CHECK_FALSE(A.is_observed(0, 2));
  CHECK_FALSE(A.is_observed(1, 1));
  CHECK(A(1, 2) == 3.0);
}

TEST_CASE("malformed input names the location") {
  std::istringstream bad("1,2\n3,x\n");
  try {
    parse_csv(bad);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
  }
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(parse_csv(ragged), DataError);
  std::istringstream negative("1,-2\n");
  CHECK_THROWS_AS(parse_csv(negative), DataError);
}

TEST_CASE("round trip is exact") {
  std::mt19937_64 rng(3);
  auto A = testing::random_matrix(6, 5, 0.7, rng);
  A.set_missing(2, 3);
  std::ostringstream out;
  write_csv(out, A);
  std::istringstream in(out.str());
  CHECK(parse_csv(in) == A);

  const auto path = std::filesystem::temp_directory_path() / "subtrop_rt.csv";
  write_csv(path, A);
  CHECK(read_csv(path) == A);
  std::filesystem::remove(path);
}

TEST_CASE("format_double keeps every bit") {
  for (double v : {0.1, 1.0 / 3.0, 123456.789, 5e-300}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

}  // TEST_SUITE
