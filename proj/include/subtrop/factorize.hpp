#ifndef SUBTROP_FACTORIZE_HPP_
#define SUBTROP_FACTORIZE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "subtrop/cancer.hpp"
#include "subtrop/capricorn.hpp"
#include "subtrop/equator.hpp"
#include "subtrop/matrix.hpp"

namespace subtrop {

enum class Algorithm { kCapricorn, kCancer };

std::string_view algorithm_name(Algorithm a);
Algorithm algorithm_from_name(std::string_view name);

// Capricorn: 4 cycles, L1. Cancer: 14 cycles, squared Frobenius.
std::size_t default_cycles(Algorithm a);
std::string_view default_objective(Algorithm a);

struct FactorizeOptions {
  Algorithm algorithm = Algorithm::kCapricorn;
  std::size_t rank = 1;
  std::optional<std::size_t> cycles;
  std::optional<std::string> objective;
  CapricornParams capricorn;
  CancerParams cancer;
  // Cancer only: divide the data by its largest observed value first so the
  // surrogate's [0, 1] search interval covers the useful range.
  bool rescale = true;
};

struct FactorizeResult {
  Factorization factors;
  EquatorTrace trace;  // errors in the units of the input data
  std::size_t cycles = 0;
  double best_error = 0.0;
  double final_error = 0.0;
  double relative_error = 0.0;  // of the best factors, NaN for a zero input
  double seconds = 0.0;
};

FactorizeResult factorize(const NonNegMatrix& A, const FactorizeOptions& opt);

}  // namespace subtrop

#endif  // SUBTROP_FACTORIZE_HPP_
