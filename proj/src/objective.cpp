#include "subtrop/objective.hpp"

#include "subtrop/error.hpp"

namespace subtrop {

std::string_view AdditiveObjective::name() const {
  switch (kind_) {
    case ObjectiveKind::kFrobenius:
      return "frobenius";
    case ObjectiveKind::kL1:
      return "l1";
    case ObjectiveKind::kJensenShannon:
      return "js";
  }
  return "unknown";
}

AdditiveObjective frobenius_sq() {
  return AdditiveObjective(ObjectiveKind::kFrobenius);
}
AdditiveObjective l1() { return AdditiveObjective(ObjectiveKind::kL1); }
AdditiveObjective jensen_shannon() {
  return AdditiveObjective(ObjectiveKind::kJensenShannon);
}

AdditiveObjective objective_from_name(std::string_view name) {
  if (name == "frobenius" || name == "fro") return frobenius_sq();
  if (name == "l1") return l1();
  if (name == "js" || name == "jensen-shannon") return jensen_shannon();
  throw UsageError("unknown objective '" + std::string(name) +
                   "' (expected frobenius, l1 or js)");
}

namespace {

void check_shapes(const NonNegMatrix& A, const NonNegMatrix& R,
                  const char* what) {
  if (A.rows() != R.rows() || A.cols() != R.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()) + " vs " +
                                std::to_string(R.rows()) + "x" +
                                std::to_string(R.cols()) + ")");
  }
}

}  // namespace

double evaluate(const AdditiveObjective& obj, const NonNegMatrix& A,
                const NonNegMatrix& R) {
  check_shapes(A, R, "evaluate");
  if (R.has_mask() && R.observed_count() != R.size()) {
    throw std::invalid_argument("evaluate: reconstruction has missing entries");
  }
  return obj.visit([&](auto cost) {
    const auto a = A.values();
    const auto r = R.values();
    const auto mask = A.mask();
    double total = 0.0;
    if (mask.empty()) {
      for (std::size_t k = 0; k < a.size(); ++k) total += cost(a[k], r[k]);
    } else {
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (mask[k]) total += cost(a[k], r[k]);
      }
    }
    return total;
  });
}

double relative_frobenius(const NonNegMatrix& A, const NonNegMatrix& R) {
  check_shapes(A, R, "relative_frobenius");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (!A.is_observed(i, j)) continue;
      const double d = A(i, j) - R(i, j);
      num += d * d;
      den += A(i, j) * A(i, j);
    }
  }
  if (den <= 0.0) {
    throw std::domain_error(
        "relative_frobenius: reference matrix has zero norm");
  }
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace subtrop
