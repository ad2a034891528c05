#ifndef SUBTROP_TESTS_HELPERS_HPP_
#define SUBTROP_TESTS_HELPERS_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "subtrop/matrix.hpp"

namespace testing {

// Plain triple loop, kept separate from the library product.
inline subtrop::NonNegMatrix naive_maxtimes(const subtrop::NonNegMatrix& B,
                                            const subtrop::NonNegMatrix& C) {
  subtrop::NonNegMatrix out(B.rows(), C.cols());
  for (std::size_t i = 0; i < B.rows(); ++i) {
    for (std::size_t j = 0; j < C.cols(); ++j) {
      double best = 0.0;
      for (std::size_t s = 0; s < B.cols(); ++s) {
        best = std::max(best, B(i, s) * C(s, j));
      }
      out.set(i, j, best);
    }
  }
  return out;
}

inline subtrop::NonNegMatrix random_matrix(std::size_t r, std::size_t c,
                                           double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  subtrop::NonNegMatrix M(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (u(rng) < density) M.set(i, j, 1.0 - u(rng));
    }
  }
  return M;
}

inline double max_abs_diff(const subtrop::NonNegMatrix& X,
                           const subtrop::NonNegMatrix& Y) {
  double d = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < X.cols(); ++j) {
      d = std::max(d, std::abs(X(i, j) - Y(i, j)));
    }
  }
  return d;
}

}  // namespace testing

#endif  // SUBTROP_TESTS_HELPERS_HPP_
