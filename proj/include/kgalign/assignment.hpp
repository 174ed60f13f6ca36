#pragma once

#include <cstdint>
#include <vector>

#include "kgalign/alignment_result.hpp"
#include "kgalign/propagation.hpp"
#include "kgalign/score_view.hpp"

namespace kgalign {

// Zero-pads to a square of side max(rows, cols). The logical shape is kept,
// so matches against padding are reported as unmatched.
ProfitMatrix pad_profit(const ProfitMatrix& x);

// Exact maximizer of <P, X> over permutations (Jonker-Volgenant shortest
// augmenting paths on the negated profit). X must be square.
AlignmentResult solve_hungarian(const ProfitMatrix& x);

struct SinkhornConfig {
  int iterations = 10;
  double temperature = 0.02;

  void validate() const;
};

struct DoublyStochasticMatrix {
  RowMatrixD values;
  int iterations_run = 0;
  double temperature = 0.0;
  Eigen::Index logical_rows = 0;
  Eigen::Index logical_cols = 0;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// S^k(X / tau) computed with log-domain potentials; the last half-step
// normalizes columns. The rvalue overload reuses the profit buffer.
DoublyStochasticMatrix sinkhorn(const ProfitMatrix& x, const SinkhornConfig& cfg);
DoublyStochasticMatrix sinkhorn(ProfitMatrix&& x, const SinkhornConfig& cfg);

ScoreView view_of(const ProfitMatrix& x);
ScoreView view_of(const DoublyStochasticMatrix& s);

// Greedy one-to-one extraction: repeatedly take the largest remaining entry
// whose row and column are both free (ties: lower row, then lower column).
// Only the logical region takes part.
AlignmentResult extract_alignment(const DoublyStochasticMatrix& s, const ProfitMatrix& x);
AlignmentResult extract_alignment(const ScoreView& scores, Solver solver);

// Per-row top-k columns, descending, ties by lower column index.
std::vector<std::vector<EntityIndex>> rank_candidates(const ScoreView& scores, std::size_t k);

}  // namespace kgalign
