#ifndef SUBTROP_CANCER_HPP_
#define SUBTROP_CANCER_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "subtrop/equator.hpp"
#include "subtrop/objective.hpp"
#include "subtrop/polymin.hpp"

namespace subtrop {

// Block updater for continuous noise: one entry of b or c at a time, each
// chosen by minimizing a polynomial surrogate of the column (row) error.
struct CancerParams {
  int max_degree = 16;           // t: degrees cycle through 2 .. t + 1
  double update_fraction = 0.1;  // f: floor(f (n + m) / 2) updates per vector
  bool random_abscissae = false;
  std::uint64_t seed = 0;        // only used with random_abscissae

  void validate() const;
};

// 2 + (floor((count - 1) / rank) mod max_degree).
int cancer_degree(std::size_t count, std::size_t rank, int max_degree);

// floor(f (n + m) / 2), at least 1.
std::size_t cancer_inner_iterations(std::size_t n, std::size_t m, double f);

// Each column's surrogate minimizer and sample abscissae are scored by the
// exact error of the column; the entry of c with the largest strict
// improvement is set to its best value (lowest column on ties). c is returned
// unchanged when nothing improves.
std::vector<double> adjust_one_element(const NonNegMatrix& A,
                                       const NonNegMatrix& N,
                                       std::span<const double> b,
                                       std::vector<double> c,
                                       const SurrogateMinimizer& minimizer,
                                       const AdditiveObjective& obj);

// Starting block used when the block being replaced is identically zero. The
// seed row has the largest uncovered cost and q is its largest uncovered
// entry; c is the seed row's uncovered part over that entry and b is column
// q's uncovered part. Rows and then columns whose entries raise the error are
// zeroed. Zero when nothing is left to cover.
Block seed_block(const NonNegMatrix& A, const NonNegMatrix& N,
                 const AdditiveObjective& obj);

class CancerUpdater : public BlockUpdater {
 public:
  explicit CancerUpdater(CancerParams params = {},
                         AdditiveObjective obj = frobenius_sq());

  std::string_view name() const override { return "cancer"; }
  Block update_block(const NonNegMatrix& A, const NonNegMatrix& B,
                     const NonNegMatrix& C, std::size_t count) override;

  const CancerParams& params() const { return params_; }
  const AdditiveObjective& objective() const { return obj_; }

 private:
  const SurrogateMinimizer& minimizer_for(int degree, std::size_t count);

  CancerParams params_;
  AdditiveObjective obj_;
  std::map<int, SurrogateMinimizer> cache_;
  std::vector<SurrogateMinimizer> scratch_;
};

}  // namespace subtrop

#endif  // SUBTROP_CANCER_HPP_
