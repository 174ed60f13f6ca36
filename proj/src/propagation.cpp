#include "kgalign/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "kgalign/error.hpp"

namespace kgalign {

void PropagationConfig::validate() const {
  if (depth < 0 || depth > kMaxDepth) {
    throw ConfigError("depth must be in [0, " + std::to_string(kMaxDepth) + "], got " + std::to_string(depth));
  }
  if (!depth_weights.empty() && depth_weights.size() != static_cast<std::size_t>(depth) + 1) {
    throw ConfigError("depth_weights needs depth + 1 entries");
  }
  for (const double w : depth_weights) {
    if (!std::isfinite(w)) throw ConfigError("non-finite depth weight");
  }
}

FeatureMatrix sparse_times_dense(const SparseMatrix& adj, const FeatureMatrix& x) {
  if (static_cast<Eigen::Index>(adj.size()) != x.rows()) {
    throw DimensionError("adjacency size " + std::to_string(adj.size()) + " differs from feature rows " +
                         std::to_string(x.rows()));
  }
  FeatureMatrix y(x.rows(), x.dim());
  const auto n = static_cast<Eigen::Index>(adj.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cols = adj.row_cols(static_cast<std::size_t>(i));
    const auto ws = adj.row_weights(static_cast<std::size_t>(i));
    auto out = y.values.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out.noalias() += ws[k] * x.values.row(cols[k]);
  }
  return y;
}

std::vector<FeatureMatrix> propagate(const SparseMatrix& adj, const FeatureMatrix& features, int depth) {
  PropagationConfig{depth, {}}.validate();
  if (static_cast<Eigen::Index>(adj.size()) != features.rows()) {
    throw DimensionError("adjacency size differs from feature rows");
  }
  std::vector<FeatureMatrix> out;
  out.reserve(static_cast<std::size_t>(depth) + 1);
  out.push_back(features);
  for (int l = 1; l <= depth; ++l) out.push_back(sparse_times_dense(adj, out.back()));
  return out;
}

namespace {

void check_profit_inputs(std::span<const FeatureMatrix> source, std::span<const FeatureMatrix> target,
                         std::span<const double> depth_weights) {
  if (source.empty() || source.size() != target.size()) {
    throw DimensionError("propagated feature lists must be non-empty and of equal length");
  }
  if (!depth_weights.empty() && depth_weights.size() != source.size()) {
    throw DimensionError("depth_weights length differs from propagation depth");
  }
  for (std::size_t l = 0; l < source.size(); ++l) {
    if (source[l].dim() != target[l].dim()) throw DimensionError("feature dimensions differ");
    if (source[l].rows() != source[0].rows() || target[l].rows() != target[0].rows()) {
      throw DimensionError("row count changes across depths");
    }
  }
}

}  // namespace

void for_each_profit_strip(std::span<const FeatureMatrix> source, std::span<const FeatureMatrix> target,
                           std::span<const double> depth_weights, Eigen::Index strip_rows,
                           const std::function<void(Eigen::Index, const RowMatrixD&)>& sink) {
  check_profit_inputs(source, target, depth_weights);
  if (strip_rows <= 0) throw ConfigError("strip_rows must be positive");
  const Eigen::Index rows = source[0].rows();
  const Eigen::Index cols = target[0].rows();
  RowMatrixD strip;
  for (Eigen::Index r0 = 0; r0 < rows; r0 += strip_rows) {
    const Eigen::Index h = std::min(strip_rows, rows - r0);
    strip.setZero(h, cols);
    for (std::size_t l = 0; l < source.size(); ++l) {
      const double w = depth_weights.empty() ? 1.0 : depth_weights[l];
      strip.noalias() += w * (source[l].values.middleRows(r0, h) * target[l].values.transpose());
    }
    sink(r0, strip);
  }
}

ProfitMatrix profit_matrix(std::span<const FeatureMatrix> source, std::span<const FeatureMatrix> target,
                           std::span<const double> depth_weights, Eigen::Index strip_rows) {
  check_profit_inputs(source, target, depth_weights);
  ProfitMatrix x;
  x.depth_used = static_cast<int>(source.size()) - 1;
  x.logical_rows = source[0].rows();
  x.logical_cols = target[0].rows();
  x.values.resize(x.logical_rows, x.logical_cols);
  for_each_profit_strip(source, target, depth_weights, strip_rows, [&](Eigen::Index r0, const RowMatrixD& strip) {
    x.values.middleRows(r0, strip.rows()) = strip;
  });
  return x;
}

double objective_value(const AlignmentResult& alignment, std::span<const FeatureMatrix> source,
                       std::span<const FeatureMatrix> target) {
  check_profit_inputs(source, target, {});
  const Eigen::Index n = source[0].rows();
  if (target[0].rows() != n || static_cast<Eigen::Index>(alignment.mapping.size()) != n) {
    throw DimensionError("objective_value needs a balanced instance");
  }
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const auto& m : alignment.mapping) {
    if (!m || *m >= n || used[*m]) throw ValidationError("objective_value needs a total permutation");
    used[*m] = true;
  }
  double total = 0.0;
  for (std::size_t l = 0; l < source.size(); ++l) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto j = static_cast<Eigen::Index>(*alignment.mapping[static_cast<std::size_t>(i)]);
      total += (source[l].values.row(i) - target[l].values.row(j)).squaredNorm();
    }
  }
  return total;
}

}  // namespace kgalign
