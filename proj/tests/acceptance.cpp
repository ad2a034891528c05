// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
// Usage: acceptance [N ...]   (no arguments runs everything)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subtrop/csv.hpp"
#include "subtrop/experiment.hpp"
#include "subtrop/factorize.hpp"
#include "subtrop/objective.hpp"
#include "subtrop/oracle.hpp"
#include "subtrop/polymin.hpp"
#include "subtrop/synth.hpp"

using namespace subtrop;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

NonNegMatrix naive_product(const NonNegMatrix& B, const NonNegMatrix& C) {
  NonNegMatrix out(B.rows(), C.cols());
  for (std::size_t i = 0; i < B.rows(); ++i) {
    for (std::size_t j = 0; j < C.cols(); ++j) {
      double v = 0.0;
      for (std::size_t s = 0; s < B.cols(); ++s) v = std::max(v, B(i, s) * C(s, j));
      out.set(i, j, v);
    }
  }
  return out;
}

double zero_fraction(const NonNegMatrix& M) {
  double z = 0.0;
  for (double v : M.values()) z += v == 0.0;
  return z / static_cast<double>(M.size());
}

// Relative Frobenius error of the best factors against a reference matrix.
double rel_to(const NonNegMatrix& ref, const FactorizeResult& r) {
  return relative_frobenius(ref, naive_product(r.factors.B, r.factors.C));
}

FactorizeResult run(const NonNegMatrix& A, Algorithm a, std::size_t rank) {
  FactorizeOptions opt;
  opt.algorithm = a;
  opt.rank = rank;
  return factorize(A, opt);
}

SynthInstance instance(std::size_t n, std::size_t m, std::size_t k,
                       double density, NoiseKind kind, double level,
                       std::uint64_t seed) {
  SynthSpec s;
  s.rows = n;
  s.cols = m;
  s.rank = k;
  s.density = density;
  s.noise = {kind, level};
  s.seed = seed;
  return generate_instance(s);
}

Outcome exact_recovery() {
  auto t0 = std::chrono::steady_clock::now();
  const auto small = instance(200, 160, 5, 0.3, NoiseKind::kNone, 0.0, 1);
  const double e_small = rel_to(small.clean, run(small.clean, Algorithm::kCapricorn, 5));
  const double t_small = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto big = instance(1000, 800, 10, 0.3, NoiseKind::kNone, 0.0, 1);
  const double e_big = rel_to(big.clean, run(big.clean, Algorithm::kCapricorn, 10));
  const double t_big = seconds_since(t0);

  return {e_small <= 1e-6 && t_small < 30.0 && e_big <= 1e-3 && t_big < 600.0,
          "200x160 err " + fmt(e_small) + " in " + fmt(t_small) + "s; 1000x800 err " +
              fmt(e_big) + " in " + fmt(t_big) + "s"};
}

Outcome flip_robustness() {
  bool ok = true;
  std::string detail;
  for (int step = 0; step <= 5; ++step) {
    const double alpha = 0.1 * step;
    double sum = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const auto in = instance(200, 160, 5, 0.3, NoiseKind::kTropicalFlip, alpha,
                               derive_seed(100, rep));
      sum += rel_to(in.clean, run(in.noisy, Algorithm::kCapricorn, 5));
    }
    const double mean = sum / 10.0;
    ok = ok && mean <= 0.1;
    detail += (step ? ", " : "mean err by alpha: ") + fmt(alpha) + "->" + fmt(mean);
  }
  return {ok, detail};
}

Outcome gaussian_behavior() {
  double cancer = 0.0, capricorn = 0.0, floor = 0.0, slowest = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto in = instance(200, 160, 5, 0.5, NoiseKind::kGaussian, 0.01,
                             derive_seed(200, rep));
    floor += relative_frobenius(in.clean, in.noisy) / 10.0;
    const auto r = run(in.noisy, Algorithm::kCancer, 5);
    slowest = std::max(slowest, r.seconds);
    cancer += r.relative_error / 10.0;
    capricorn += run(in.noisy, Algorithm::kCapricorn, 5).relative_error / 10.0;
  }
  return {cancer <= 3.0 * floor && cancer < capricorn && slowest < 300.0,
          "noise floor " + fmt(floor) + ", cancer " + fmt(cancer) + ", capricorn " +
              fmt(capricorn) + ", slowest cancer run " + fmt(slowest) + "s"};
}

Outcome cross_noise() {
  double cancer = 0.0, capricorn = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto in = instance(200, 160, 5, 0.3, NoiseKind::kTropicalFlip, 0.3,
                             derive_seed(300, rep));
    cancer += rel_to(in.clean, run(in.noisy, Algorithm::kCancer, 5)) / 10.0;
    capricorn += rel_to(in.clean, run(in.noisy, Algorithm::kCapricorn, 5)) / 10.0;
  }
  return {capricorn < cancer,
          "capricorn " + fmt(capricorn) + " vs cancer " + fmt(cancer)};
}

Outcome sparsity_bound() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dim(1, 20), inner(1, 8);
  std::size_t violations = 0, oracle_mismatch = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = dim(rng), k = inner(rng), m = dim(rng);
    const double dB = u(rng), dC = u(rng);
    NonNegMatrix B(n, k), C(k, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < k; ++s)
        if (u(rng) < dB) B.set(i, s, 1.0 - u(rng));
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t j = 0; j < m; ++j)
        if (u(rng) < dC) C.set(s, j, 1.0 - u(rng));
    NonNegMatrix A = naive_product(B, C);
    if (t % 2 == 1) {
      const double bumps = u(rng);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (u(rng) < bumps) A.set(i, j, A(i, j) + u(rng));
    }
    const double slack = zero_fraction(B) + zero_fraction(C) - zero_fraction(A);
    violations += slack < -1e-12;
    const auto chk = oracle::check_sparsity_bound(B, C, A);
    oracle_mismatch += chk.holds != (slack >= -1e-12) ||
                       std::abs(chk.slack - slack) > 1e-12;
  }
  return {violations == 0 && oracle_mismatch == 0,
          std::to_string(violations) + " violations, " +
              std::to_string(oracle_mismatch) + " oracle disagreements in 1000 cases"};
}

Outcome maxplus_transfer() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0), eps(-0.1, 0.1), p(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> inner(1, 5);
  std::size_t violations = 0, premises = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = inner(rng);
    oracle::MaxPlusMatrix B(5, k), C(k, 5);
    for (auto& e : B.entries) e = p(rng) < 0.1 ? oracle::MaxPlus::bot() : oracle::MaxPlus::of(u(rng));
    for (auto& e : C.entries) e = p(rng) < 0.1 ? oracle::MaxPlus::bot() : oracle::MaxPlus::of(u(rng));
    auto A = oracle::maxplus_product(B, C);
    for (auto& e : A.entries) {
      if (!e.bottom) e.value += eps(rng);
    }
    const double lambda = oracle::maxplus_distance_sq(A, oracle::maxplus_product(B, C));
    const auto chk = oracle::check_maxplus_transfer(A, B, C, lambda);
    premises += chk.premise;
    violations += !chk.holds;
  }
  return {violations == 0 && premises == 200,
          std::to_string(violations) + " violations in 200 cases"};
}

// Least number of all-ones rectangles covering the ones of a 3x3 matrix.
std::size_t rectangle_cover_rank(unsigned bits) {
  auto one = [&](unsigned i, unsigned j) { return (bits >> (3 * i + j)) & 1u; };
  std::vector<unsigned> rects;  // 9-bit masks
  for (unsigned rs = 1; rs < 8; ++rs) {
    for (unsigned cs = 1; cs < 8; ++cs) {
      unsigned mask = 0;
      bool full = true;
      for (unsigned i = 0; i < 3; ++i)
        for (unsigned j = 0; j < 3; ++j)
          if ((rs >> i & 1u) && (cs >> j & 1u)) {
            full = full && one(i, j);
            mask |= 1u << (3 * i + j);
          }
      if (full) rects.push_back(mask);
    }
  }
  if (bits == 0) return 0;
  for (std::size_t k = 1; k <= 3; ++k) {
    std::function<bool(std::size_t, std::size_t, unsigned)> pick =
        [&](std::size_t start, std::size_t left, unsigned cov) {
          if (left == 0) return cov == bits;
          for (std::size_t r = start; r < rects.size(); ++r)
            if (pick(r + 1, left - 1, cov | rects[r])) return true;
          return false;
        };
    if (pick(0, k, 0)) return k;
  }
  return 4;
}

Outcome boolean_rank() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  for (unsigned bits = 0; bits < 512; ++bits) {
    NonNegMatrix A(3, 3);
    for (unsigned p = 0; p < 9; ++p) A.set(p / 3, p % 3, (bits >> p) & 1u);
    mismatches += oracle::exhaustive_subtropical_rank_binary(A) != rectangle_cover_rank(bits);
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          std::to_string(mismatches) + " mismatches over 512 matrices in " + fmt(secs) + "s"};
}

double gamma_local(const std::vector<double>& a, const std::vector<double>& n,
                   const std::vector<double>& b, double x, const AdditiveObjective& obj) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += obj.cost(a[i], std::max(n[i], b[i] * x));
  return s;
}

Outcome polymin_soundness() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> deg(8, 17);
  const AdditiveObjective objs[] = {frobenius_sq(), l1(), jensen_shannon()};
  double worst_quad = 0.0;
  std::size_t grid_fail = 0;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a(20), n(20, 0.0), b(20);
    for (double& v : a) v = u(rng);
    for (double& v : b) v = u(rng);
    double ab = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
      ab += a[i] * b[i];
      bb += b[i] * b[i];
    }
    const double closed = std::clamp(ab / bb, 0.0, 1.0);
    worst_quad = std::max(worst_quad, std::abs(polymin(a, n, b, 2, frobenius_sq()).x - closed));

    for (double& v : n) v = u(rng) < 0.5 ? 0.0 : u(rng);
    const auto& obj = objs[t % 3];
    const auto r = polymin(a, n, b, deg(rng), obj);
    double lo = 1e300, hi = -1e300;
    for (int g = 0; g <= 10000; ++g) {
      const double v = gamma_local(a, n, b, g / 10000.0, obj);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    grid_fail += gamma_local(a, n, b, r.x, obj) > lo + 0.05 * (hi - lo) + 1e-12;
  }
  return {worst_quad <= 1e-6 && grid_fail == 0,
          "quadratic max deviation " + fmt(worst_quad) + ", " + std::to_string(grid_fail) +
              " of 500 above the grid tolerance"};
}

Outcome equator_contract() {
  const fs::path dir = fs::temp_directory_path() / "subtrop_acceptance_rt";
  fs::create_directories(dir);
  bool ok = true;
  double worst = 0.0;
  std::size_t runs = 0;
  const NoiseKind kinds[] = {NoiseKind::kNone, NoiseKind::kTropicalFlip, NoiseKind::kGaussian};
  for (int t = 0; t < 6; ++t) {
    const auto in = instance(60, 50, 4, 0.4, kinds[t % 3], t % 3 == 2 ? 0.05 : 0.2,
                             derive_seed(900, t));
    for (Algorithm a : {Algorithm::kCapricorn, Algorithm::kCancer}) {
      const auto r = run(in.noisy, a, 4);
      ++runs;
      for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
        ok = ok && r.trace.records[i].best_error <= r.trace.records[i - 1].best_error;
      }
      write_csv(dir / "B.csv", r.factors.B);
      write_csv(dir / "C.csv", r.factors.C);
      const auto B = read_csv(dir / "B.csv");
      const auto C = read_csv(dir / "C.csv");
      const double again =
          evaluate(objective_from_name(r.factors.objective_name), in.noisy, naive_product(B, C));
      const double rel = std::abs(again - r.best_error) / std::max(r.best_error, 1e-300);
      worst = std::max(worst, r.best_error == 0.0 ? again : rel);
    }
  }
  fs::remove_all(dir);
  ok = ok && worst <= 1e-9;
  return {ok, std::to_string(runs) + " runs, best error monotone " + (ok ? "yes" : "no") +
                  ", worst CSV round-trip deviation " + fmt(worst)};
}

Outcome prediction() {
  std::istringstream in(
      "[experiment]\nname = predict\nrepetitions = 10\nseed = 11\n"
      "[sweep]\ninteger_levels = 5\n[predict]\nholdout_fraction = 0.1\n");
  const auto results = run_experiment(parse_experiment_config(in), 1);
  double acc = 0.0, base = 0.0;
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.ok;
    acc += r.accuracy_nonzero / static_cast<double>(results.size());
    base += r.baseline_accuracy_nonzero / static_cast<double>(results.size());
  }
  return {ok && acc >= base + 0.10,
          "capricorn accuracy " + fmt(acc) + " vs majority baseline " + fmt(base)};
}

Outcome convergence() {
  const auto in = instance(200, 160, 5, 0.5, NoiseKind::kGaussian, 0.01, derive_seed(400, 0));
  const auto r = run(in.noisy, Algorithm::kCancer, 5);
  const auto& rec = r.trace.records;
  const std::size_t total = rec.size() - 1;
  const std::size_t quarter = (total + 3) / 4;
  // Compared on the relative Frobenius scale.
  const double early = std::sqrt(rec[quarter].best_error);
  const double final_best = std::sqrt(rec.back().best_error);
  return {early <= 1.05 * final_best,
          "best after " + std::to_string(quarter) + "/" + std::to_string(total) +
              " iterations is " + fmt(early / final_best) + "x the final best"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact recovery without noise", exact_recovery},
      {"robustness to tropical flip noise", flip_robustness},
      {"cancer under gaussian noise", gaussian_behavior},
      {"capricorn ahead of cancer on flip noise", cross_noise},
      {"sparsity bound on dominated products", sparsity_bound},
      {"max-plus to max-times error transfer", maxplus_transfer},
      {"boolean and subtropical rank agree on 3x3", boolean_rank},
      {"polymin against closed form and grid", polymin_soundness},
      {"equator trace and CSV round trip", equator_contract},
      {"prediction beats majority baseline", prediction},
      {"cancer converges early", convergence},
  };
  std::set<std::size_t> wanted;
  for (int i = 1; i < argc; ++i) {
    const long v = std::strtol(argv[i], nullptr, 10);
    if (v < 1 || v > static_cast<long>(criteria.size())) {
      std::cerr << "unknown criterion " << argv[i] << '\n';
      return 2;
    }
    wanted.insert(static_cast<std::size_t>(v));
  }
  int failures = 0;
  for (std::size_t c = 1; c <= criteria.size(); ++c) {
    if (!wanted.empty() && !wanted.count(c)) continue;
    Outcome o;
    try {
      o = criteria[c - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c << "] "
              << criteria[c - 1].first << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
