#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kgalign/adjacency.hpp"
#include "kgalign/alignment_result.hpp"
#include "kgalign/features.hpp"

namespace kgalign {

struct PropagationConfig {
  static constexpr int kMaxDepth = 16;

  int depth = 2;
  // Per-depth weights; empty means all ones.
  std::vector<double> depth_weights;

  void validate() const;
};

// Source-major profit matrix: entry (i, j) scores source i against target j.
// This is the transpose of the target-major form sum_l A_t^l H_t (A_s^l H_s)^T.
//
// After pad_profit the matrix may be larger than the logical (unpadded) shape.
struct ProfitMatrix {
  RowMatrixD values;
  int depth_used = 0;
  Eigen::Index logical_rows = 0;
  Eigen::Index logical_cols = 0;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool is_padded() const { return logical_rows != rows() || logical_cols != cols(); }
};

// [H, A H, A (A H), ...], depth + 1 elements.
std::vector<FeatureMatrix> propagate(const SparseMatrix& adj, const FeatureMatrix& features, int depth);

// y = A x, row-parallel.
FeatureMatrix sparse_times_dense(const SparseMatrix& adj, const FeatureMatrix& x);

// Calls `sink(first_row, strip)` for consecutive horizontal strips of the
// profit matrix, each computed independently in double precision.
void for_each_profit_strip(std::span<const FeatureMatrix> source, std::span<const FeatureMatrix> target,
                           std::span<const double> depth_weights, Eigen::Index strip_rows,
                           const std::function<void(Eigen::Index, const RowMatrixD&)>& sink);

ProfitMatrix profit_matrix(std::span<const FeatureMatrix> source, std::span<const FeatureMatrix> target,
                           std::span<const double> depth_weights = {}, Eigen::Index strip_rows = 1024);

// sum_l || P A_s^l H_s - A_t^l H_t ||_F^2 for the permutation given by a total
// alignment (row i of the source side is compared with row mapping[i]).
double objective_value(const AlignmentResult& alignment, std::span<const FeatureMatrix> source,
                       std::span<const FeatureMatrix> target);

}  // namespace kgalign
