#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "kgalign/adjacency.hpp"
#include "kgalign/assignment.hpp"
#include "kgalign/features.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/propagation.hpp"

namespace testutil {

using kgalign::EntityIndex;
using kgalign::RowMatrixD;

inline RowMatrixD random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo = 0.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RowMatrixD m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline RowMatrixD random_unit_rows(std::mt19937_64& rng, Eigen::Index r, Eigen::Index d) {
  std::normal_distribution<double> g;
  RowMatrixD m(r, d);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) m(i, k) = g(rng);
    m.row(i).normalize();
  }
  return m;
}

inline kgalign::ProfitMatrix as_profit(RowMatrixD m) {
  kgalign::ProfitMatrix x;
  x.logical_rows = m.rows();
  x.logical_cols = m.cols();
  x.values = std::move(m);
  return x;
}

inline std::vector<EntityIndex> random_perm(std::mt19937_64& rng, std::size_t n) {
  std::vector<EntityIndex> p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline std::vector<EntityIndex> identity_perm(std::size_t n) {
  std::vector<EntityIndex> p(n);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

// Random multi-relational graph with raw entity ids 0..n-1 (self-loops allowed
// only when asked for).
inline kgalign::KnowledgeGraph random_kg(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t triples,
                                         bool self_loops = false) {
  std::uniform_int_distribution<kgalign::RawId> e(0, static_cast<kgalign::RawId>(n) - 1);
  std::uniform_int_distribution<kgalign::RawId> r(0, static_cast<kgalign::RawId>(m) - 1);
  std::vector<kgalign::RawTriple> ts;
  while (ts.size() < triples) {
    kgalign::RawTriple t{e(rng), r(rng), e(rng)};
    if (!self_loops && t.head == t.tail) continue;
    ts.push_back(t);
  }
  std::vector<kgalign::RawId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return kgalign::build_kg(ts, ids);
}

inline RowMatrixD dense(const kgalign::SparseMatrix& a) {
  RowMatrixD d = RowMatrixD::Zero(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto cols = a.row_cols(i);
    const auto ws = a.row_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) d(static_cast<Eigen::Index>(i), cols[k]) = ws[k];
  }
  return d;
}

// Permutation matrix with P(perm[i], i) = 1, so (P M)[perm[i]] = M[i].
inline RowMatrixD perm_matrix(const std::vector<EntityIndex>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  RowMatrixD p = RowMatrixD::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(perm[static_cast<std::size_t>(i)], i) = 1.0;
  return p;
}

// Best sum_i x(i, p[i]) over all permutations of the columns.
inline double brute_force_best(const RowMatrixD& x, std::vector<int>* arg = nullptr, int* optimum_count = nullptr) {
  std::vector<int> p(static_cast<std::size_t>(x.rows()));
  std::iota(p.begin(), p.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> all;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += x(static_cast<Eigen::Index>(i), p[i]);
    all.push_back(s);
    if (s > best) {
      best = s;
      if (arg) *arg = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  if (optimum_count) {
    *optimum_count = static_cast<int>(std::count_if(all.begin(), all.end(), [&](double s) { return s >= best - 1e-12; }));
  }
  return best;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("kgalign_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
