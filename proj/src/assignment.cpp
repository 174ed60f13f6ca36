#include "kgalign/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "kgalign/error.hpp"

namespace kgalign {

Solver parse_solver(std::string_view s) {
  if (s == "sinkhorn") return Solver::sinkhorn;
  if (s == "hungarian") return Solver::hungarian;
  throw ConfigError("unknown solver '" + std::string(s) + "' (expected sinkhorn|hungarian)");
}

std::string_view to_string(Solver s) { return s == Solver::sinkhorn ? "sinkhorn" : "hungarian"; }

std::size_t AlignmentResult::matched_count() const {
  return static_cast<std::size_t>(std::count_if(mapping.begin(), mapping.end(), [](const auto& m) { return m.has_value(); }));
}

ProfitMatrix pad_profit(const ProfitMatrix& x) {
  const Eigen::Index side = std::max(x.rows(), x.cols());
  if (x.rows() == side && x.cols() == side) return x;
  ProfitMatrix out;
  out.depth_used = x.depth_used;
  out.logical_rows = x.logical_rows;
  out.logical_cols = x.logical_cols;
  out.values = RowMatrixD::Zero(side, side);
  out.values.topLeftCorner(x.rows(), x.cols()) = x.values;
  return out;
}

namespace {

void require_finite(const RowMatrixD& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": profit matrix has non-finite entries");
}

// Jonker-Volgenant for a dense n x n minimization problem with cost(i, j).
// Returns row -> column.
template <typename Cost>
std::vector<int> lapjv(int n, const Cost& cost) {
  constexpr double kBig = std::numeric_limits<double>::max();
  std::vector<int> rowsol(n, -1);
  std::vector<int> colsol(n, -1);
  std::vector<double> v(n, 0.0);
  std::vector<int> free_rows(n);
  std::vector<int> matches(n, 0);
  if (n == 0) return rowsol;

  // Column reduction.
  for (int j = n - 1; j >= 0; --j) {
    double min = cost(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i) {
      const double c = cost(i, j);
      if (c < min) {
        min = c;
        imin = i;
      }
    }
    v[j] = min;
    if (++matches[imin] == 1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    } else if (v[j] < v[rowsol[imin]]) {
      const int j1 = rowsol[imin];
      rowsol[imin] = j;
      colsol[j] = imin;
      colsol[j1] = -1;
    } else {
      colsol[j] = -1;
    }
  }

  // Reduction transfer.
  int numfree = 0;
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      free_rows[numfree++] = i;
    } else if (matches[i] == 1 && n > 1) {
      const int j1 = rowsol[i];
      double min = kBig;
      for (int j = 0; j < n; ++j) {
        if (j != j1) min = std::min(min, cost(i, j) - v[j]);
      }
      v[j1] -= min;
    }
  }

  // Augmenting row reduction, two passes. A reduction step that rounding
  // leaves without effect is treated as a tie, keeping the loop finite.
  if (n > 1) {
    const long long step_cap = 16LL * n * n;
    long long steps = 0;
    for (int pass = 0; pass < 2 && numfree > 0 && steps < step_cap; ++pass) {
      int k = 0;
      const int prvnumfree = numfree;
      numfree = 0;
      while (k < prvnumfree) {
        const int i = free_rows[k++];
        double umin = cost(i, 0) - v[0];
        int j1 = 0;
        int j2 = 0;
        double usubmin = kBig;
        for (int j = 1; j < n; ++j) {
          const double h = cost(i, j) - v[j];
          if (h < usubmin) {
            if (h >= umin) {
              usubmin = h;
              j2 = j;
            } else {
              usubmin = umin;
              umin = h;
              j2 = j1;
              j1 = j;
            }
          }
        }
        int i0 = colsol[j1];
        const double lowered = v[j1] - (usubmin - umin);
        const bool strict = umin < usubmin && lowered < v[j1] && ++steps < step_cap;
        if (strict) {
          v[j1] = lowered;
        } else if (i0 > -1) {
          j1 = j2;
          i0 = colsol[j2];
        }
        rowsol[i] = j1;
        colsol[j1] = i;
        if (i0 > -1) {
          if (strict) {
            free_rows[--k] = i0;
          } else {
            free_rows[numfree++] = i0;
          }
        }
      }
    }
    // Rows pushed out when the cap hit are still flagged in colsol/rowsol;
    // rebuild the free list from scratch.
    numfree = 0;
    for (int i = 0; i < n; ++i) {
      if (rowsol[i] < 0 || colsol[rowsol[i]] != i) {
        rowsol[i] = -1;
        free_rows[numfree++] = i;
      }
    }
  }

  // Augmentation along shortest alternating paths.
  std::vector<int> collist(n);
  std::vector<int> pred(n);
  std::vector<double> d(n);
  for (int f = 0; f < numfree; ++f) {
    const int freerow = free_rows[f];
    for (int j = 0; j < n; ++j) {
      d[j] = cost(freerow, j) - v[j];
      pred[j] = freerow;
      collist[j] = j;
    }
    int low = 0;
    int up = 0;
    int last = 0;
    int endofpath = -1;
    double min = 0.0;
    while (endofpath < 0) {
      if (up == low) {
        last = low - 1;
        min = d[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = d[j];
          if (h <= min) {
            if (h < min) {
              up = low;
              min = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        // Lowest unassigned column among the minimal ones ends the path.
        for (int k = low; k < up; ++k) {
          const int j = collist[k];
          if (colsol[j] < 0 && (endofpath < 0 || j < endofpath)) endofpath = j;
        }
        if (endofpath >= 0) break;
      }
      const int j1 = collist[low++];
      const int i = colsol[j1];
      const double h = cost(i, j1) - v[j1] - min;
      for (int k = up; k < n; ++k) {
        const int j = collist[k];
        const double v2 = cost(i, j) - v[j] - h;
        if (v2 < d[j]) {
          pred[j] = i;
          if (v2 == min) {
            if (colsol[j] < 0) {
              endofpath = j;
              break;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
          d[j] = v2;
        }
      }
    }
    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[k];
      v[j1] += d[j1] - min;
    }
    int i = -1;
    do {
      i = pred[endofpath];
      colsol[endofpath] = i;
      const int j1 = endofpath;
      endofpath = rowsol[i];
      rowsol[i] = j1;
    } while (i != freerow);
  }
  return rowsol;
}

}  // namespace

AlignmentResult solve_hungarian(const ProfitMatrix& x) {
  if (x.rows() != x.cols()) throw DimensionError("solve_hungarian needs a square matrix; call pad_profit first");
  require_finite(x.values, "solve_hungarian");
  const int n = static_cast<int>(x.rows());
  const auto cost = [&](int i, int j) { return -x.values(i, j); };
  const auto rowsol = lapjv(n, cost);

  AlignmentResult out;
  out.solver = Solver::hungarian;
  out.mapping.assign(static_cast<std::size_t>(x.logical_rows), std::nullopt);
  out.scores.assign(static_cast<std::size_t>(x.logical_rows), 0.0);
  for (Eigen::Index i = 0; i < x.logical_rows; ++i) {
    const int j = rowsol[static_cast<std::size_t>(i)];
    if (j < x.logical_cols) {
      out.mapping[static_cast<std::size_t>(i)] = static_cast<EntityIndex>(j);
      out.scores[static_cast<std::size_t>(i)] = x.values(i, j);
    }
  }
  return out;
}

void SinkhornConfig::validate() const {
  if (iterations < 1) throw ConfigError("sinkhorn iterations must be >= 1");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("sinkhorn temperature must be > 0");
}

DoublyStochasticMatrix sinkhorn(const ProfitMatrix& x, const SinkhornConfig& cfg) {
  return sinkhorn(ProfitMatrix(x), cfg);
}

DoublyStochasticMatrix sinkhorn(ProfitMatrix&& x, const SinkhornConfig& cfg) {
  cfg.validate();
  if (x.rows() != x.cols()) throw DimensionError("sinkhorn needs a square matrix; call pad_profit first");
  require_finite(x.values, "sinkhorn");

  DoublyStochasticMatrix s;
  s.values = std::move(x.values);
  s.iterations_run = cfg.iterations;
  s.temperature = cfg.temperature;
  s.logical_rows = x.logical_rows;
  s.logical_cols = x.logical_cols;

  auto& z = s.values;
  const Eigen::Index n = z.rows();
  z /= cfg.temperature;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  constexpr Eigen::Index kColBlock = 256;
  const Eigen::Index col_blocks = (n + kColBlock - 1) / kColBlock;

  for (int it = 0; it < cfg.iterations; ++it) {
    // Row normalization: u_i = -logsumexp_j(z_ij + v_j).
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* row = z.data() + i * n;
      double m = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) m = std::max(m, row[j] + v[j]);
      double sum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) sum += std::exp(row[j] + v[j] - m);
      u[i] = -(m + std::log(sum));
    }
    // Column normalization: v_j = -logsumexp_i(z_ij + u_i), in fixed column
    // blocks so the summation order does not depend on the thread count.
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < col_blocks; ++b) {
      const Eigen::Index c0 = b * kColBlock;
      const Eigen::Index w = std::min(kColBlock, n - c0);
      std::vector<double> m(static_cast<std::size_t>(w), -std::numeric_limits<double>::infinity());
      std::vector<double> sum(static_cast<std::size_t>(w), 0.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double* row = z.data() + i * n + c0;
        for (Eigen::Index j = 0; j < w; ++j) m[j] = std::max(m[j], row[j] + u[i]);
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const double* row = z.data() + i * n + c0;
        for (Eigen::Index j = 0; j < w; ++j) sum[j] += std::exp(row[j] + u[i] - m[j]);
      }
      for (Eigen::Index j = 0; j < w; ++j) v[c0 + j] = -(m[j] + std::log(sum[j]));
    }
  }

#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double* row = z.data() + i * n;
    for (Eigen::Index j = 0; j < n; ++j) row[j] = std::exp(row[j] + u[i] + v[j]);
  }
  return s;
}

ScoreView view_of(const ProfitMatrix& x) { return {x.values.data(), x.logical_rows, x.logical_cols, x.cols()}; }

ScoreView view_of(const DoublyStochasticMatrix& s) {
  return {s.values.data(), s.logical_rows, s.logical_cols, s.cols()};
}

namespace {

// Best free column of a row; ties go to the lower index. -1 if none left.
Eigen::Index best_free_column(const double* row, Eigen::Index cols, const std::vector<char>& col_used) {
  Eigen::Index best = -1;
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (col_used[static_cast<std::size_t>(j)]) continue;
    if (best < 0 || row[j] > row[best]) best = j;
  }
  return best;
}

}  // namespace

AlignmentResult extract_alignment(const ScoreView& scores, Solver solver) {
  AlignmentResult out;
  out.solver = solver;
  out.mapping.assign(static_cast<std::size_t>(scores.rows), std::nullopt);
  out.scores.assign(static_cast<std::size_t>(scores.rows), 0.0);
  std::vector<char> col_used(static_cast<std::size_t>(scores.cols), 0);

  struct Candidate {
    double value;
    Eigen::Index row;
    Eigen::Index col;
  };
  // Max-heap on value, then lower row, then lower column.
  const auto worse = [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.row != b.row) return a.row > b.row;
    return a.col > b.col;
  };
  std::vector<Candidate> init;
  init.reserve(static_cast<std::size_t>(scores.rows));
  for (Eigen::Index i = 0; i < scores.rows; ++i) {
    const auto j = best_free_column(scores.row(i), scores.cols, col_used);
    if (j >= 0) init.push_back({scores(i, j), i, j});
  }
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(worse, std::move(init));

  // Heap keys never underestimate a row's current best, so the top entry is
  // the global maximum once its column is confirmed free.
  while (!heap.empty()) {
    const auto top = heap.top();
    heap.pop();
    if (col_used[static_cast<std::size_t>(top.col)]) {
      const auto j = best_free_column(scores.row(top.row), scores.cols, col_used);
      if (j >= 0) heap.push({scores(top.row, j), top.row, j});
      continue;
    }
    col_used[static_cast<std::size_t>(top.col)] = 1;
    out.mapping[static_cast<std::size_t>(top.row)] = static_cast<EntityIndex>(top.col);
    out.scores[static_cast<std::size_t>(top.row)] = top.value;
  }
  return out;
}

AlignmentResult extract_alignment(const DoublyStochasticMatrix& s, const ProfitMatrix& x) {
  if (s.rows() != x.rows() || s.cols() != x.cols() || s.logical_rows != x.logical_rows ||
      s.logical_cols != x.logical_cols) {
    throw DimensionError("extract_alignment: score and profit shapes differ");
  }
  return extract_alignment(view_of(s), Solver::sinkhorn);
}

std::vector<std::vector<EntityIndex>> rank_candidates(const ScoreView& scores, std::size_t k) {
  std::vector<std::vector<EntityIndex>> out(static_cast<std::size_t>(scores.rows));
  const auto take = std::min<std::size_t>(k, static_cast<std::size_t>(scores.cols));
#pragma omp parallel for schedule(dynamic, 64)
  for (Eigen::Index i = 0; i < scores.rows; ++i) {
    const double* row = scores.row(i);
    std::vector<EntityIndex> idx(static_cast<std::size_t>(scores.cols));
    std::iota(idx.begin(), idx.end(), EntityIndex{0});
    const auto better = [row](EntityIndex a, EntityIndex b) { return row[a] != row[b] ? row[a] > row[b] : a < b; };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), better);
    idx.resize(take);
    out[static_cast<std::size_t>(i)] = std::move(idx);
  }
  return out;
}

}  // namespace kgalign
