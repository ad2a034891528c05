#ifndef SUBTROP_SYNTH_HPP_
#define SUBTROP_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subtrop/matrix.hpp"

namespace subtrop {

enum class NoiseKind { kNone, kTropicalDensity, kTropicalFlip, kGaussian };

std::string_view noise_kind_name(NoiseKind kind);
// Accepts none, tropical-density, tropical-flip, gaussian (underscores too).
NoiseKind noise_kind_from_name(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kNone;
  double level = 0.0;  // density l, flip fraction alpha, or sigma
};

struct SynthSpec {
  std::size_t rows = 200;
  std::size_t cols = 160;
  std::size_t rank = 5;
  double density = 0.3;
  NoiseSpec noise;
  // 0 draws factor values from (0, 1]. L > 0 draws B from {1..L} and makes C
  // binary, so the clean matrix is integer valued in {0..L}.
  int integer_levels = 0;
  std::uint64_t seed = 0;
};

struct SynthInstance {
  NonNegMatrix clean;
  NonNegMatrix noisy;
  NonNegMatrix true_B;
  NonNegMatrix true_C;
  SynthSpec spec;
  std::vector<std::string> warnings;
};

struct GeneratedFactors {
  NonNegMatrix B;
  NonNegMatrix C;
  std::vector<std::string> warnings;
};

// Each factor gets exactly floor(density * entries) nonzeros at uniformly
// random positions with values in (0, 1].
GeneratedFactors gen_factors(std::size_t n, std::size_t m, std::size_t k,
                             double density, std::uint64_t seed,
                             int integer_levels = 0);

// max{A, N} where N is uniform (0, 1] noise with floor((1 - l) n m) entries
// zeroed.
NonNegMatrix apply_tropical_density_noise(const NonNegMatrix& A, double level,
                                          std::uint64_t seed);
// floor(alpha * nnz(A)) distinct positions, drawn from the whole matrix, are
// overwritten with uniform (0, 1] values.
NonNegMatrix apply_tropical_flip_noise(const NonNegMatrix& A, double alpha,
                                       std::uint64_t seed);
// max{A + G, 0} with G ~ Normal(0, sigma^2).
NonNegMatrix apply_gaussian_noise(const NonNegMatrix& A, double sigma,
                                  std::uint64_t seed);
NonNegMatrix apply_noise(const NonNegMatrix& A, const NoiseSpec& noise,
                         std::uint64_t seed);

SynthInstance generate_instance(const SynthSpec& spec);

// Holdout request: either a fraction of the candidate entries or a fixed
// count per row. Candidates are observed entries, restricted to nonzeros
// when `nonzeros_only` is set.
struct HoldoutSpec {
  std::optional<double> fraction;
  std::optional<std::size_t> per_row;
  bool nonzeros_only = true;
};

// Bits set on held-out entries. Throws DataError listing the rows that
// cannot supply `per_row` candidates.
PatternMatrix sample_holdout(const NonNegMatrix& A, const HoldoutSpec& spec,
                             std::uint64_t seed);

// Copy of A with the holdout entries marked missing.
NonNegMatrix mask_holdout(const NonNegMatrix& A, const PatternMatrix& holdout);

// Deterministic 64-bit seed mixing (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace subtrop

#endif  // SUBTROP_SYNTH_HPP_
