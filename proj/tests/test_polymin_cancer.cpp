#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "subtrop/cancer.hpp"
#include "subtrop/error.hpp"
#include "subtrop/polymin.hpp"

using namespace subtrop;

namespace {

// Column error Σ (a_i - max{n_i, b_i x})^2, recomputed locally.
double column_sq(const std::vector<double>& a, const std::vector<double>& n,
                 const std::vector<double>& b, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = std::max(n[i], b[i] * x);
    s += (a[i] - r) * (a[i] - r);
  }
  return s;
}

}  // namespace

TEST_SUITE("polymin") {

TEST_CASE("equispaced abscissae") {
  const auto xs = equispaced_abscissae(2);
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == doctest::Approx(1.0 / 6.0));
  CHECK(xs[1] == doctest::Approx(0.5));
  CHECK(xs[2] == doctest::Approx(5.0 / 6.0));
  const auto rs = random_abscissae(5, 3);
  CHECK(rs.size() == 6);
  CHECK(std::is_sorted(rs.begin(), rs.end()));
  CHECK(rs.front() > 0.0);
  CHECK(rs.back() < 1.0);
}

TEST_CASE("interpolant reproduces a polynomial") {
  auto p = [](double x) { return 0.2 - x + 3 * x * x * x - 0.5 * x * x * x * x; };
  const auto m = SurrogateMinimizer::equispaced(4);
  std::vector<double> ys;
  for (double x : m.abscissae()) ys.push_back(p(x));
  const PolyFit g = m.fit(ys);
  for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    CHECK(g(x) == doctest::Approx(p(x)).epsilon(1e-10));
  }
  CHECK(g.derivative(0.4) ==
        doctest::Approx(-1 + 9 * 0.16 - 2 * 0.064).epsilon(1e-9));
}

TEST_CASE("minimize picks interior roots and endpoints") {
  const auto m = SurrogateMinimizer::equispaced(2);
  std::vector<double> ys;
  for (double x : m.abscissae()) ys.push_back((x - 0.3) * (x - 0.3));
  CHECK(m.minimize(ys).x == doctest::Approx(0.3).epsilon(1e-12));
  ys.clear();
  for (double x : m.abscissae()) ys.push_back((x - 1.7) * (x - 1.7));
  CHECK(m.minimize(ys).x == 1.0);
  ys.assign(3, 2.0);
  CHECK(m.minimize(ys).x == 0.0);
}

TEST_CASE("gamma value") {
  const std::vector<double> a{1, 2}, n{0.5, 3}, b{1, 1};
  CHECK(gamma_value(a, n, b, 1.0, frobenius_sq()) == doctest::Approx(1.0));
}

TEST_CASE("zero b gives a constant function") {
  const std::vector<double> a{0.3, 0.9}, n{0.1, 0.2}, b{0, 0};
  const auto r = polymin(a, n, b, 4, frobenius_sq());
  CHECK(r.x == 0.0);
  CHECK(r.error == doctest::Approx(gamma_value(a, n, b, 0.0, frobenius_sq())));
}

TEST_CASE("single row recovers the data value") {
  for (int deg = 2; deg <= 10; ++deg) {
    for (double a : {0.05, 0.4, 0.93}) {
      const std::vector<double> av{a}, nv{0.0}, bv{1.0};
      CHECK(polymin(av, nv, bv, deg, frobenius_sq()).x ==
            doctest::Approx(a).epsilon(1e-6));
    }
  }
}

TEST_CASE("quadratic case matches the closed form") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(12), n(12, 0.0), b(12);
    for (double& v : a) v = u(rng);
    for (double& v : b) v = 0.1 + u(rng);
    double ab = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += a[i] * b[i];
      bb += b[i] * b[i];
    }
    const double closed = std::clamp(ab / bb, 0.0, 1.0);
    CHECK(std::abs(polymin(a, n, b, 2, frobenius_sq()).x - closed) < 1e-6);
  }
}

TEST_CASE("high degree is close to a dense grid") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(15), n(15), b(15);
    for (std::size_t i = 0; i < 15; ++i) {
      a[i] = u(rng);
      n[i] = u(rng) < 0.5 ? 0.0 : u(rng);
      b[i] = u(rng);
    }
    const auto r = polymin(a, n, b, 10, frobenius_sq());
    double lo = 1e300, hi = -1e300;
    for (int g = 0; g <= 2000; ++g) {
      const double v = column_sq(a, n, b, g / 2000.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(column_sq(a, n, b, r.x) <= lo + 0.05 * (hi - lo) + 1e-12);
  }
}

}  // TEST_SUITE

TEST_SUITE("cancer") {

TEST_CASE("schedules") {
  CHECK(cancer_degree(1, 5, 16) == 2);
  CHECK(cancer_degree(6, 5, 16) == 3);
  CHECK(cancer_degree(16 * 5 + 1, 5, 16) == 2);
  CHECK(cancer_inner_iterations(10, 10, 0.1) == 1);
  CHECK(cancer_inner_iterations(200, 160, 0.1) == 18);
}

TEST_CASE("parameter validation") {
  CancerParams p;
  p.max_degree = 2;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = {};
  p.update_fraction = 1.0;
  CHECK_THROWS_AS(p.validate(), UsageError);
}

TEST_CASE("adjust_one_element never increases the error") {
  std::mt19937_64 rng(17);
  const auto obj = frobenius_sq();
  const auto minimizer = SurrogateMinimizer::equispaced(6);
  for (int rep = 0; rep < 30; ++rep) {
    const auto A = testing::random_matrix(9, 7, 0.6, rng);
    const auto N = testing::random_matrix(9, 7, 0.2, rng);
    std::vector<double> b(9), c(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : b) v = u(rng);
    for (double& v : c) v = u(rng) < 0.5 ? 0.0 : u(rng);
    auto err = [&](const std::vector<double>& cc) {
      double s = 0.0;
      for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t j = 0; j < 7; ++j) {
          s += obj.cost(A(i, j), std::max(N(i, j), b[i] * cc[j]));
        }
      }
      return s;
    };
    const auto c2 = adjust_one_element(A, N, b, c, minimizer, obj);
    std::size_t changed = 0;
    for (std::size_t j = 0; j < 7; ++j) changed += c2[j] != c[j];
    CHECK(changed <= 1);
    CHECK(err(c2) <= err(c) + 1e-12);
  }
}

TEST_CASE("column dominated by N stays put") {
  const auto A = NonNegMatrix::from_rows({{0.2}, {0.3}});
  const auto N = NonNegMatrix::from_rows({{1.0}, {1.0}});
  const std::vector<double> b{0.5, 0.5};
  const auto c = adjust_one_element(A, N, b, {0.4}, SurrogateMinimizer::equispaced(3),
                                    frobenius_sq());
  CHECK(c[0] == 0.4);
}

TEST_CASE("update_block improves on zero factors") {
  std::mt19937_64 rng(2);
  const auto A = testing::random_matrix(12, 10, 0.5, rng);
  CancerUpdater up(CancerParams{}, frobenius_sq());
  const NonNegMatrix B(12, 2), C(2, 10);
  const Block blk = up.update_block(A, B, C, 1);
  NonNegMatrix Bn = B, Cn = C;
  set_column(Bn, 0, blk.b);
  set_row(Cn, 0, blk.c);
  CHECK(evaluate(frobenius_sq(), A, maxtimes_product(Bn, Cn)) <
        evaluate(frobenius_sq(), A, NonNegMatrix(12, 10)));
}

}  // TEST_SUITE
