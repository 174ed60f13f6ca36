#pragma once

#include <Eigen/Dense>

namespace kgalign {

// Read-only window onto the logical (unpadded) region of a dense score matrix.
struct ScoreView {
  const double* data = nullptr;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index stride = 0;

  double operator()(Eigen::Index i, Eigen::Index j) const { return data[i * stride + j]; }
  const double* row(Eigen::Index i) const { return data + i * stride; }
};

}  // namespace kgalign
