#include "subtrop/polymin.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace subtrop {

namespace {

double horner(std::span<const double> coef, double t) {
  double acc = 0.0;
  for (std::size_t k = coef.size(); k-- > 0;) acc = acc * t + coef[k];
  return acc;
}

double horner_derivative(std::span<const double> coef, double t) {
  double acc = 0.0;
  for (std::size_t k = coef.size(); k-- > 1;) {
    acc = acc * t + static_cast<double>(k) * coef[k];
  }
  return acc;
}

}  // namespace

double PolyFit::operator()(double x) const {
  return horner(coefficients, 2.0 * x / upper - 1.0);
}

double PolyFit::derivative(double x) const {
  return horner_derivative(coefficients, 2.0 * x / upper - 1.0) * 2.0 / upper;
}

std::vector<double> equispaced_abscissae(int degree, double upper) {
  std::vector<double> xs(static_cast<std::size_t>(degree) + 1);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    xs[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(xs.size()) *
            upper;
  }
  return xs;
}

std::vector<double> random_abscissae(int degree, std::uint64_t seed,
                                     double upper) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t count = static_cast<std::size_t>(degree) + 1;
  std::vector<double> xs;
  while (xs.size() < count) {
    const double x = unit(rng) * upper;
    if (x <= 0.0 || x >= upper) continue;
    if (std::find(xs.begin(), xs.end(), x) != xs.end()) continue;
    xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

struct SurrogateMinimizer::Lu {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

SurrogateMinimizer::SurrogateMinimizer(int degree,
                                       std::vector<double> abscissae,
                                       double upper)
    : degree_(degree), upper_(upper), abscissae_(std::move(abscissae)) {
  if (degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
  if (!(upper > 0.0)) throw std::invalid_argument("search interval is empty");
  const auto n = static_cast<Eigen::Index>(degree) + 1;
  if (static_cast<Eigen::Index>(abscissae_.size()) != n) {
    throw std::invalid_argument("need degree + 1 sample abscissae");
  }
  Eigen::MatrixXd V(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double t = 2.0 * abscissae_[static_cast<std::size_t>(r)] / upper - 1.0;
    double p = 1.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      V(r, c) = p;
      p *= t;
    }
  }
  lu_ = std::make_unique<Lu>(Lu{V.partialPivLu()});
}

SurrogateMinimizer::~SurrogateMinimizer() = default;
SurrogateMinimizer::SurrogateMinimizer(SurrogateMinimizer&&) noexcept = default;
SurrogateMinimizer& SurrogateMinimizer::operator=(
    SurrogateMinimizer&&) noexcept = default;

SurrogateMinimizer SurrogateMinimizer::equispaced(int degree, double upper) {
  return SurrogateMinimizer(degree, equispaced_abscissae(degree, upper),
                            upper);
}

PolyFit SurrogateMinimizer::fit(std::span<const double> ordinates) const {
  const auto n = static_cast<Eigen::Index>(degree_) + 1;
  if (static_cast<Eigen::Index>(ordinates.size()) != n) {
    throw std::invalid_argument("need degree + 1 ordinates");
  }
  const Eigen::Map<const Eigen::VectorXd> y(ordinates.data(), n);
  const Eigen::VectorXd coef = lu_->lu.solve(y);
  PolyFit g;
  g.degree = degree_;
  g.upper = upper_;
  g.coefficients.assign(coef.data(), coef.data() + n);
  g.abscissae = abscissae_;
  g.ordinates.assign(ordinates.begin(), ordinates.end());
  return g;
}

PolyMinResult SurrogateMinimizer::minimize(
    std::span<const double> ordinates) const {
  return minimize(fit(ordinates));
}

std::vector<double> SurrogateMinimizer::candidates(const PolyFit& g) const {
  const std::span<const double> coef = g.coefficients;
  // Roots of g' in t in [-1, 1] by bracketing on a grid and bisecting.
  std::vector<double> candidates{-1.0};
  const int cells = std::max(32, 8 * degree_);
  double t0 = -1.0;
  double d0 = horner_derivative(coef, t0);
  for (int k = 1; k <= cells; ++k) {
    const double t1 = -1.0 + 2.0 * k / cells;
    const double d1 = horner_derivative(coef, t1);
    if (d1 == 0.0) {
      candidates.push_back(t1);
    } else if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
      double lo = t0, hi = t1, dlo = d0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dm = horner_derivative(coef, mid);
        if (dm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((dm < 0.0) == (dlo < 0.0)) {
          lo = mid;
          dlo = dm;
        } else {
          hi = mid;
        }
      }
      candidates.push_back(0.5 * (lo + hi));
    }
    t0 = t1;
    d0 = d1;
  }
  candidates.push_back(1.0);
  for (double& t : candidates) t = std::max(0.0, (t + 1.0) * 0.5 * upper_);
  return candidates;
}

PolyMinResult SurrogateMinimizer::minimize(const PolyFit& g) const {
  PolyMinResult best{0.0, 0.0};
  bool first = true;
  for (double x : candidates(g)) {
    const double v = g(x);
    if (first || v < best.error) best = {v, x};
    first = false;
  }
  return best;
}

double gamma_value(std::span<const double> a_col,
                   std::span<const double> n_col, std::span<const double> b,
                   double x, const AdditiveObjective& obj,
                   std::span<const std::uint8_t> observed) {
  if (a_col.size() != n_col.size() || a_col.size() != b.size() ||
      (!observed.empty() && observed.size() != a_col.size())) {
    throw std::invalid_argument("gamma_value: length mismatch");
  }
  return obj.visit([&](auto cost) {
    double total = 0.0;
    for (std::size_t i = 0; i < a_col.size(); ++i) {
      if (!observed.empty() && !observed[i]) continue;
      total += cost(a_col[i], std::max(n_col[i], b[i] * x));
    }
    return total;
  });
}

PolyMinResult polymin(std::span<const double> a_col,
                      std::span<const double> n_col,
                      std::span<const double> b,
                      const SurrogateMinimizer& minimizer,
                      const AdditiveObjective& obj,
                      std::span<const std::uint8_t> observed) {
  bool varies = false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] > 0.0 && (observed.empty() || observed[i])) {
      varies = true;
      break;
    }
  }
  if (!varies) return {gamma_value(a_col, n_col, b, 0.0, obj, observed), 0.0};

  std::vector<double> ys;
  ys.reserve(minimizer.abscissae().size());
  for (double x : minimizer.abscissae()) {
    ys.push_back(gamma_value(a_col, n_col, b, x, obj, observed));
  }
  // The interpolant can swing far from gamma' near its kinks, so the
  // stationary points and the samples themselves are scored exactly.
  std::vector<double> xs = minimizer.candidates(minimizer.fit(ys));
  xs.insert(xs.end(), minimizer.abscissae().begin(), minimizer.abscissae().end());
  std::sort(xs.begin(), xs.end());
  PolyMinResult best{gamma_value(a_col, n_col, b, xs.front(), obj, observed),
                     xs.front()};
  for (double x : xs) {
    const double v = gamma_value(a_col, n_col, b, x, obj, observed);
    if (v < best.error) best = {v, x};
  }
  return best;
}

PolyMinResult polymin(std::span<const double> a_col,
                      std::span<const double> n_col,
                      std::span<const double> b, int degree,
                      const AdditiveObjective& obj,
                      std::span<const std::uint8_t> observed) {
  if (degree < 2) throw std::invalid_argument("polymin: degree must be >= 2");
  return polymin(a_col, n_col, b, SurrogateMinimizer::equispaced(degree), obj,
                 observed);
}

}  // namespace subtrop
