#ifndef SUBTROP_OBJECTIVE_HPP_
#define SUBTROP_OBJECTIVE_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "subtrop/matrix.hpp"

namespace subtrop {

enum class ObjectiveKind { kFrobenius, kL1, kJensenShannon };

namespace phi {

inline double frobenius(double a, double r) { return (a - r) * (a - r); }
inline double l1(double a, double r) { return std::abs(a - r); }

// a log(2a/(a+r)) + r log(2r/(a+r)), with 0 log(0/x) = 0.
inline double jensen_shannon(double a, double r) {
  const double sum = a + r;
  if (sum <= 0.0) return 0.0;
  double out = 0.0;
  if (a > 0.0) out += a * std::log(2.0 * a / sum);
  if (r > 0.0) out += r * std::log(2.0 * r / sum);
  // Rounding can push the result a hair below zero near a == r.
  return out > 0.0 ? out : 0.0;
}

}  // namespace phi

// Elementwise cost E(A, R) = Σ φ(A_ij, R_ij) over the observed entries of A.
class AdditiveObjective {
 public:
  explicit AdditiveObjective(ObjectiveKind kind = ObjectiveKind::kFrobenius)
      : kind_(kind) {}

  ObjectiveKind kind() const { return kind_; }
  std::string_view name() const;

  double cost(double a, double r) const {
    switch (kind_) {
      case ObjectiveKind::kFrobenius:
        return phi::frobenius(a, r);
      case ObjectiveKind::kL1:
        return phi::l1(a, r);
      case ObjectiveKind::kJensenShannon:
        if (a < 0.0 || r < 0.0) {
          throw std::domain_error("Jensen-Shannon cost needs a, r >= 0");
        }
        return phi::jensen_shannon(a, r);
    }
    return 0.0;
  }

  // Calls f with a stateless per-element cost functor so hot loops can be
  // instantiated once per objective.
  template <class F>
  decltype(auto) visit(F&& f) const {
    switch (kind_) {
      case ObjectiveKind::kL1:
        return f([](double a, double r) { return phi::l1(a, r); });
      case ObjectiveKind::kJensenShannon:
        return f([](double a, double r) { return phi::jensen_shannon(a, r); });
      case ObjectiveKind::kFrobenius:
      default:
        return f([](double a, double r) { return phi::frobenius(a, r); });
    }
  }

 private:
  ObjectiveKind kind_;
};

AdditiveObjective frobenius_sq();
AdditiveObjective l1();
AdditiveObjective jensen_shannon();

// Accepts "frobenius", "l1", "js" (and "jensen-shannon").
AdditiveObjective objective_from_name(std::string_view name);

// Masked entries of A contribute nothing. R must be fully observed.
double evaluate(const AdditiveObjective& obj, const NonNegMatrix& A,
                const NonNegMatrix& R);

// ||A - R||_F / ||A||_F over the observed entries of A.
double relative_frobenius(const NonNegMatrix& A, const NonNegMatrix& R);

}  // namespace subtrop

#endif  // SUBTROP_OBJECTIVE_HPP_
