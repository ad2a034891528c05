#ifndef SUBTROP_CAPRICORN_HPP_
#define SUBTROP_CAPRICORN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "subtrop/equator.hpp"
#include "subtrop/matrix.hpp"

namespace subtrop {

// Block updater for discrete ("flipping") noise. Blocks are found by looking
// for groups of rows whose elementwise ratios stay nearly constant.
struct CapricornParams {
  std::size_t bucket_size = 3;  // smallest accepted ratio bucket
  double delta = 0.01;          // bucket width on the log-ratio scale
  double theta = 0.5;           // max overcover/gain ratio when expanding
  double tau = 0.5;             // correlation slack when pruning rows

  void validate() const;
};

// Indices where u and v are both strictly positive and log(u/v) falls in the
// most populous width-`delta` bucket, counted from the smallest log-ratio.
// Empty when that bucket holds fewer than `bucket_size` indices. Ties go to
// the lowest bucket; the result is in ascending index order.
std::vector<std::size_t> find_row_set(std::span<const double> u,
                                      std::span<const double> v,
                                      std::size_t bucket_size, double delta);

// <H_i, H_seed> / (<H_i, H_i> + 1).
double row_correlation(const PatternMatrix& H, std::size_t seed,
                       std::size_t i);

// Binary pattern of the block passing through row `seed` of the residual.
// Missing residual entries are read as 0.
PatternMatrix correlations_with_row(const NonNegMatrix& R, std::size_t seed,
                                    std::size_t bucket_size, double delta,
                                    double tau);

// Smallest u_t / w_t inside the find_row_set bucket of (u, w); the smallest
// ratio over all positive pairs when there is no bucket, 0 when there is no
// such pair.
double dominant_ratio(std::span<const double> u, std::span<const double> w,
                      std::size_t bucket_size, double delta);

// Rank-1 fit of R restricted to b_idx x c_idx. The eight restricted rows with
// the largest mass each seed c in turn, b and c are re-estimated from
// dominant ratios, and the fit with the least L1 misfit on the core wins.
Block recover_block(const NonNegMatrix& R, std::span<const std::size_t> b_idx,
                    std::span<const std::size_t> c_idx,
                    std::size_t bucket_size = 3, double delta = 0.01);

// Overcover divided by gain for adding alpha * c on the columns `cols` of a
// data row. +inf when the gain is not positive.
double expansion_impact(std::span<const double> a_row,
                        std::span<const double> c,
                        std::span<const std::size_t> cols, double alpha);

// Fills zero entries of b whose data row is (locally) a multiple of c and
// whose expansion impact is at most theta. Missing entries of A are ignored.
std::vector<double> add_rows(std::vector<double> b, std::span<const double> c,
                             const NonNegMatrix& A,
                             const CapricornParams& params);

// A where the product without block `block` falls short of it; every other
// entry is missing.
NonNegMatrix capricorn_residual(const NonNegMatrix& A, const NonNegMatrix& B,
                                const NonNegMatrix& C, std::size_t block);

class CapricornUpdater : public BlockUpdater {
 public:
  explicit CapricornUpdater(CapricornParams params = {});

  std::string_view name() const override { return "capricorn"; }
  Block update_block(const NonNegMatrix& A, const NonNegMatrix& B,
                     const NonNegMatrix& C, std::size_t count) override;

  const CapricornParams& params() const { return params_; }

 private:
  CapricornParams params_;
};

}  // namespace subtrop

#endif  // SUBTROP_CAPRICORN_HPP_
