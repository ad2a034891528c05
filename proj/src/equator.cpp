#include "subtrop/equator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "subtrop/csv.hpp"
#include "subtrop/error.hpp"

namespace subtrop {

void EquatorTrace::write_csv(std::ostream& out) const {
  out << "iteration,block,error,best_error,status\n";
  for (const auto& r : records) {
    out << r.iteration << ',';
    if (r.block) out << (*r.block + 1);
    out << ',' << format_double(r.error) << ',' << format_double(r.best_error)
        << ',' << (r.failed ? "failed" : "ok") << '\n';
  }
}

namespace {

void validate_block(const Block& blk, std::size_t n, std::size_t m) {
  if (blk.b.size() != n || blk.c.size() != m) {
    throw std::runtime_error("updater returned a block of the wrong shape");
  }
  for (double v : blk.b) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::runtime_error("updater returned a negative or non-finite b");
    }
  }
  for (double v : blk.c) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::runtime_error("updater returned a negative or non-finite c");
    }
  }
}

}  // namespace

EquatorResult run_equator(const NonNegMatrix& A, std::size_t rank,
                          std::size_t cycles, BlockUpdater& updater,
                          const AdditiveObjective& obj) {
  if (rank == 0) throw UsageError("rank must be at least 1");
  if (cycles == 0) throw UsageError("cycles must be at least 1");
  if (A.rows() == 0 || A.cols() == 0) {
    throw std::invalid_argument("run_equator: empty input matrix");
  }
  const std::size_t n = A.rows(), m = A.cols();

  NonNegMatrix B(n, rank), C(rank, m);
  EquatorResult result;
  result.factors.B = B;
  result.factors.C = C;
  result.factors.objective_name = std::string(obj.name());
  double best = evaluate(obj, A, maxtimes_product(B, C));
  result.trace.records.push_back({0, std::nullopt, best, best, false, {}});

  const std::size_t total = rank * cycles;
  for (std::size_t count = 1; count <= total; ++count) {
    const std::size_t l = block_index(count, rank);
    TraceRecord rec;
    rec.iteration = count;
    rec.block = l;
    try {
      Block blk = updater.update_block(A, B, C, count);
      validate_block(blk, n, m);
      set_column(B, l, blk.b);
      set_row(C, l, blk.c);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.message = e.what();
    }
    const double err = evaluate(obj, A, maxtimes_product(B, C));
    if (err < best) {
      best = err;
      result.factors.B = B;
      result.factors.C = C;
    }
    rec.error = err;
    rec.best_error = best;
    result.trace.records.push_back(std::move(rec));
  }
  result.best_error = best;
  return result;
}

}  // namespace subtrop
