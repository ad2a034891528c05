#include "subtrop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "subtrop/error.hpp"

namespace subtrop {

namespace {

// Uniform on (0, 1].
double unit_open_closed(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return 1.0 - u(rng);
}

std::vector<std::size_t> sample_positions(std::size_t total, std::size_t count,
                                          std::mt19937_64& rng) {
  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> out;
  out.reserve(count);
  std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng);
  return out;
}

NonNegMatrix random_sparse(std::size_t rows, std::size_t cols, double density,
                           std::mt19937_64& rng, int levels, bool binary) {
  const std::size_t total = rows * cols;
  const auto count = static_cast<std::size_t>(
      std::floor(density * static_cast<double>(total)));
  std::vector<double> values(total, 0.0);
  std::uniform_int_distribution<int> level(1, std::max(levels, 1));
  for (std::size_t p : sample_positions(total, count, rng)) {
    if (binary) {
      values[p] = 1.0;
    } else if (levels > 0) {
      values[p] = static_cast<double>(level(rng));
    } else {
      values[p] = unit_open_closed(rng);
    }
  }
  return NonNegMatrix(rows, cols, std::move(values));
}

}  // namespace

std::string_view noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone:
      return "none";
    case NoiseKind::kTropicalDensity:
      return "tropical-density";
    case NoiseKind::kTropicalFlip:
      return "tropical-flip";
    case NoiseKind::kGaussian:
      return "gaussian";
  }
  return "none";
}

NoiseKind noise_kind_from_name(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "none") return NoiseKind::kNone;
  if (s == "tropical-density") return NoiseKind::kTropicalDensity;
  if (s == "tropical-flip" || s == "flip") return NoiseKind::kTropicalFlip;
  if (s == "gaussian") return NoiseKind::kGaussian;
  throw UsageError("unknown noise kind '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

GeneratedFactors gen_factors(std::size_t n, std::size_t m, std::size_t k,
                             double density, std::uint64_t seed,
                             int integer_levels) {
  if (n == 0 || m == 0 || k == 0) {
    throw UsageError("gen_factors: dimensions must be positive");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw UsageError("gen_factors: density must be in (0, 1]");
  }
  if (integer_levels < 0) throw UsageError("integer levels must be >= 0");
  GeneratedFactors out;
  std::mt19937_64 rng(seed);
  out.B = random_sparse(n, k, density, rng, integer_levels, false);
  out.C = random_sparse(k, m, density, rng, integer_levels,
                        integer_levels > 0);
  if (density * static_cast<double>(n * k) < static_cast<double>(k) ||
      density * static_cast<double>(k * m) < static_cast<double>(k)) {
    out.warnings.push_back(
        "factor density is below one nonzero per block; some blocks may be "
        "empty");
  }
  return out;
}

NonNegMatrix apply_tropical_density_noise(const NonNegMatrix& A, double level,
                                          std::uint64_t seed) {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw UsageError("tropical density noise level must be in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  const std::size_t total = A.size();
  std::vector<double> noise(total);
  for (double& v : noise) v = unit_open_closed(rng);
  const auto zeroed = static_cast<std::size_t>(
      std::floor((1.0 - level) * static_cast<double>(total)));
  for (std::size_t p : sample_positions(total, zeroed, rng)) noise[p] = 0.0;

  NonNegMatrix out = A;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (A.is_observed(i, j)) {
        out.set(i, j, std::max(A(i, j), noise[i * A.cols() + j]));
      }
    }
  }
  return out;
}

NonNegMatrix apply_tropical_flip_noise(const NonNegMatrix& A, double alpha,
                                       std::uint64_t seed) {
  if (!(alpha >= 0.0)) throw UsageError("flip fraction must be >= 0");
  std::size_t observed_nnz = 0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      observed_nnz += A.is_observed(i, j) && A(i, j) != 0.0;
    }
  }
  const auto count = static_cast<std::size_t>(
      std::floor(alpha * static_cast<double>(observed_nnz)));
  if (count > A.size()) {
    throw UsageError("flip noise requests " + std::to_string(count) +
                     " entries but the matrix has only " +
                     std::to_string(A.size()));
  }
  std::mt19937_64 rng(seed);
  NonNegMatrix out = A;
  for (std::size_t p : sample_positions(A.size(), count, rng)) {
    const double v = unit_open_closed(rng);
    if (A.is_observed(p / A.cols(), p % A.cols())) {
      out.set(p / A.cols(), p % A.cols(), v);
    }
  }
  return out;
}

NonNegMatrix apply_gaussian_noise(const NonNegMatrix& A, double sigma,
                                  std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw UsageError("gaussian sigma must be >= 0");
  if (sigma == 0.0) return A;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  NonNegMatrix out = A;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      const double e = g(rng);
      if (A.is_observed(i, j)) out.set(i, j, std::max(A(i, j) + e, 0.0));
    }
  }
  return out;
}

NonNegMatrix apply_noise(const NonNegMatrix& A, const NoiseSpec& noise,
                         std::uint64_t seed) {
  switch (noise.kind) {
    case NoiseKind::kNone:
      return A;
    case NoiseKind::kTropicalDensity:
      return apply_tropical_density_noise(A, noise.level, seed);
    case NoiseKind::kTropicalFlip:
      return apply_tropical_flip_noise(A, noise.level, seed);
    case NoiseKind::kGaussian:
      return apply_gaussian_noise(A, noise.level, seed);
  }
  return A;
}

SynthInstance generate_instance(const SynthSpec& spec) {
  SynthInstance inst;
  inst.spec = spec;
  auto factors = gen_factors(spec.rows, spec.cols, spec.rank, spec.density,
                             derive_seed(spec.seed, 0), spec.integer_levels);
  inst.true_B = std::move(factors.B);
  inst.true_C = std::move(factors.C);
  inst.warnings = std::move(factors.warnings);
  inst.clean = maxtimes_product(inst.true_B, inst.true_C);
  inst.noisy = apply_noise(inst.clean, spec.noise, derive_seed(spec.seed, 1));
  return inst;
}

PatternMatrix sample_holdout(const NonNegMatrix& A, const HoldoutSpec& spec,
                             std::uint64_t seed) {
  if (spec.fraction.has_value() == spec.per_row.has_value()) {
    throw UsageError("holdout needs exactly one of fraction or per-row count");
  }
  auto candidate = [&](std::size_t i, std::size_t j) {
    return A.is_observed(i, j) && (!spec.nonzeros_only || A(i, j) != 0.0);
  };
  std::mt19937_64 rng(seed);
  PatternMatrix mask(A.rows(), A.cols());

  if (spec.fraction) {
    const double f = *spec.fraction;
    if (!(f >= 0.0 && f <= 1.0)) {
      throw UsageError("holdout fraction must be in [0, 1]");
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < A.rows(); ++i) {
      for (std::size_t j = 0; j < A.cols(); ++j) {
        if (candidate(i, j)) pool.push_back(i * A.cols() + j);
      }
    }
    const auto count = static_cast<std::size_t>(
        std::floor(f * static_cast<double>(pool.size())));
    std::vector<std::size_t> picked;
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), count,
                rng);
    for (std::size_t p : picked) mask.set(p / A.cols(), p % A.cols(), true);
    return mask;
  }

  const std::size_t per_row = *spec.per_row;
  std::vector<std::size_t> short_rows;
  std::vector<std::vector<std::size_t>> pools(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (candidate(i, j)) pools[i].push_back(j);
    }
    if (pools[i].size() < per_row) short_rows.push_back(i);
  }
  if (!short_rows.empty()) {
    std::string rows;
    for (std::size_t t = 0; t < short_rows.size() && t < 20; ++t) {
      rows += (t ? ", " : "") + std::to_string(short_rows[t] + 1);
    }
    if (short_rows.size() > 20) rows += ", ...";
    throw DataError(std::to_string(short_rows.size()) +
                    " row(s) have fewer than " + std::to_string(per_row) +
                    " candidate entries: " + rows);
  }
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::vector<std::size_t> picked;
    std::sample(pools[i].begin(), pools[i].end(), std::back_inserter(picked),
                per_row, rng);
    for (std::size_t j : picked) mask.set(i, j, true);
  }
  return mask;
}

NonNegMatrix mask_holdout(const NonNegMatrix& A, const PatternMatrix& holdout) {
  if (holdout.rows() != A.rows() || holdout.cols() != A.cols()) {
    throw std::invalid_argument("mask_holdout: shape mismatch");
  }
  NonNegMatrix out = A;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (holdout(i, j)) out.set_missing(i, j);
    }
  }
  return out;
}

}  // namespace subtrop
