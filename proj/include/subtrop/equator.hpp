#ifndef SUBTROP_EQUATOR_HPP_
#define SUBTROP_EQUATOR_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subtrop/matrix.hpp"
#include "subtrop/objective.hpp"

namespace subtrop {

// A rank-1 block b c: b has one entry per row of A, c one per column.
struct Block {
  std::vector<double> b;
  std::vector<double> c;
};

// Strategy slot of the greedy cyclic framework. Given the data and the current
// factors, proposes a replacement for block (count - 1) mod k.
class BlockUpdater {
 public:
  virtual ~BlockUpdater() = default;
  virtual std::string_view name() const = 0;
  // `count` is the 1-based iteration counter of the outer loop.
  virtual Block update_block(const NonNegMatrix& A, const NonNegMatrix& B,
                             const NonNegMatrix& C, std::size_t count) = 0;
};

inline std::size_t block_index(std::size_t count, std::size_t rank) {
  return (count - 1) % rank;
}

struct TraceRecord {
  std::size_t iteration = 0;          // 0 is the all-zero starting point
  std::optional<std::size_t> block;   // 0-based; empty for iteration 0
  double error = 0.0;
  double best_error = 0.0;
  bool failed = false;                // updater threw; block left unchanged
  std::string message;
};

struct EquatorTrace {
  std::vector<TraceRecord> records;

  // Columns: iteration,block,error,best_error,status. Blocks are written
  // 1-based; the initial row has an empty block cell.
  void write_csv(std::ostream& out) const;
};

struct EquatorResult {
  Factorization factors;
  EquatorTrace trace;
  double best_error = 0.0;
};

// Starts from B = 0, C = 0 and replaces one block per iteration for
// rank * cycles iterations, keeping the best factors seen under `obj`.
EquatorResult run_equator(const NonNegMatrix& A, std::size_t rank,
                          std::size_t cycles, BlockUpdater& updater,
                          const AdditiveObjective& obj);

}  // namespace subtrop

#endif  // SUBTROP_EQUATOR_HPP_
