#include "subtrop/factorize.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "subtrop/error.hpp"
#include "subtrop/objective.hpp"

namespace subtrop {

std::string_view algorithm_name(Algorithm a) {
  return a == Algorithm::kCancer ? "cancer" : "capricorn";
}

Algorithm algorithm_from_name(std::string_view name) {
  if (name == "capricorn") return Algorithm::kCapricorn;
  if (name == "cancer") return Algorithm::kCancer;
  throw UsageError("unknown algorithm '" + std::string(name) + "'");
}

std::size_t default_cycles(Algorithm a) {
  return a == Algorithm::kCancer ? 14 : 4;
}

std::string_view default_objective(Algorithm a) {
  return a == Algorithm::kCancer ? "frobenius" : "l1";
}

namespace {

// Each objective is homogeneous in (a, r): E(sA, sR) = s^p E(A, R).
double homogeneity(ObjectiveKind kind) {
  return kind == ObjectiveKind::kFrobenius ? 2.0 : 1.0;
}

NonNegMatrix scaled(const NonNegMatrix& A, double s) {
  NonNegMatrix out = A;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (A.is_observed(i, j)) out.set(i, j, A(i, j) * s);
    }
  }
  return out;
}

}  // namespace

FactorizeResult factorize(const NonNegMatrix& A, const FactorizeOptions& opt) {
  if (opt.rank == 0) throw UsageError("rank must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const AdditiveObjective obj = objective_from_name(
      opt.objective.value_or(std::string(default_objective(opt.algorithm))));
  const std::size_t cycles = opt.cycles.value_or(default_cycles(opt.algorithm));
  if (cycles == 0) throw UsageError("cycles must be at least 1");

  double scale = 1.0;
  std::unique_ptr<BlockUpdater> updater;
  if (opt.algorithm == Algorithm::kCancer) {
    updater = std::make_unique<CancerUpdater>(opt.cancer, obj);
    if (opt.rescale) {
      const double top = max_observed(A);
      if (top > 0.0) scale = top;
    }
  } else {
    updater = std::make_unique<CapricornUpdater>(opt.capricorn);
  }

  const NonNegMatrix work = scale == 1.0 ? A : scaled(A, 1.0 / scale);
  EquatorResult run = run_equator(work, opt.rank, cycles, *updater, obj);

  FactorizeResult out;
  out.cycles = cycles;
  out.factors = std::move(run.factors);
  out.trace = std::move(run.trace);
  if (scale != 1.0) {
    out.factors.B = scaled(out.factors.B, scale);
    const double unit = std::pow(scale, homogeneity(obj.kind()));
    for (auto& r : out.trace.records) {
      r.error *= unit;
      r.best_error *= unit;
    }
  }
  out.factors.scale = scale;
  out.factors.objective_name = std::string(obj.name());

  const NonNegMatrix R = reconstruct(out.factors);
  out.best_error = evaluate(obj, A, R);
  out.final_error = out.trace.records.back().error;
  try {
    out.relative_error = relative_frobenius(A, R);
  } catch (const std::domain_error&) {
    out.relative_error = std::numeric_limits<double>::quiet_NaN();
  }
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

}  // namespace subtrop
