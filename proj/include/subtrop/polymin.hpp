#ifndef SUBTROP_POLYMIN_HPP_
#define SUBTROP_POLYMIN_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "subtrop/objective.hpp"

namespace subtrop {

// Interpolating polynomial of degree `degree` through the sample points.
// Coefficients are stored in the shifted variable t = 2x/upper - 1 so the
// Vandermonde system stays well conditioned on [0, upper].
struct PolyFit {
  int degree = 0;
  double upper = 1.0;
  std::vector<double> coefficients;  // ascending powers of t
  std::vector<double> abscissae;
  std::vector<double> ordinates;

  double operator()(double x) const;
  double derivative(double x) const;
};

struct PolyMinResult {
  double error = 0.0;  // surrogate value g(x*)
  double x = 0.0;
};

// (j + 0.5) / (degree + 1) * upper for j = 0..degree.
std::vector<double> equispaced_abscissae(int degree, double upper = 1.0);
// Sorted distinct uniform draws from (0, upper).
std::vector<double> random_abscissae(int degree, std::uint64_t seed,
                                     double upper = 1.0);

// Fits and minimizes interpolants through a fixed set of abscissae. The
// Vandermonde factorization is computed once and reused for every fit.
class SurrogateMinimizer {
 public:
  SurrogateMinimizer(int degree, std::vector<double> abscissae,
                     double upper = 1.0);
  ~SurrogateMinimizer();
  SurrogateMinimizer(SurrogateMinimizer&&) noexcept;
  SurrogateMinimizer& operator=(SurrogateMinimizer&&) noexcept;

  static SurrogateMinimizer equispaced(int degree, double upper = 1.0);

  int degree() const { return degree_; }
  double upper() const { return upper_; }
  std::span<const double> abscissae() const { return abscissae_; }

  PolyFit fit(std::span<const double> ordinates) const;
  // Both endpoints and the real roots of g' inside [0, upper], ascending.
  std::vector<double> candidates(const PolyFit& g) const;

  // Minimizes the interpolant over [0, upper]. Candidates are both endpoints
  // and the real roots of g' inside the interval; the smallest value wins,
  // ties to the smallest x.
  PolyMinResult minimize(std::span<const double> ordinates) const;
  PolyMinResult minimize(const PolyFit& g) const;

 private:
  struct Lu;
  int degree_;
  double upper_;
  std::vector<double> abscissae_;
  std::unique_ptr<Lu> lu_;
};

// gamma'(x) = Σ_i φ(a_i, max{n_i, b_i x}) over observed i (all i when
// `observed` is empty).
double gamma_value(std::span<const double> a_col,
                   std::span<const double> n_col, std::span<const double> b,
                   double x, const AdditiveObjective& obj,
                   std::span<const std::uint8_t> observed = {});

// Surrogate minimization of gamma' on [0, 1] with equispaced samples. The
// surrogate's stationary points, the endpoints and the sample abscissae are
// scored by gamma' itself; returns (gamma'(x*), x*) for the best of them,
// smallest x on ties. Returns (gamma'(0), 0) when b has no positive entry on
// an observed row, since gamma' is then constant.
PolyMinResult polymin(std::span<const double> a_col,
                      std::span<const double> n_col,
                      std::span<const double> b, int degree,
                      const AdditiveObjective& obj,
                      std::span<const std::uint8_t> observed = {});
PolyMinResult polymin(std::span<const double> a_col,
                      std::span<const double> n_col,
                      std::span<const double> b,
                      const SurrogateMinimizer& minimizer,
                      const AdditiveObjective& obj,
                      std::span<const std::uint8_t> observed = {});

}  // namespace subtrop

#endif  // SUBTROP_POLYMIN_HPP_
