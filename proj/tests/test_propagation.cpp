#include <doctest.h>

#include "helpers.hpp"
#include "kgalign/error.hpp"
#include "kgalign/propagation.hpp"

using namespace kgalign;
using testutil::dense;

namespace {

SparseMatrix random_sparse(std::mt19937_64& rng, std::size_t n, double density) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  std::vector<SparseMatrix::Entry> es;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (keep(rng)) es.push_back({i, j, w(rng)});
  return SparseMatrix::from_entries(n, std::move(es));
}

AlignmentResult as_alignment(const std::vector<EntityIndex>& perm) {
  AlignmentResult r;
  for (auto p : perm) r.mapping.emplace_back(p);
  r.scores.assign(perm.size(), 0.0);
  return r;
}

// Isomorphic pair: target = relabel(source, perm), features moved along.
struct Iso {
  std::vector<FeatureMatrix> src;
  std::vector<FeatureMatrix> tgt;
  std::vector<EntityIndex> perm;
};

Iso iso_instance(std::mt19937_64& rng, std::size_t n, int depth, AdjacencyKind kind = AdjacencyKind::relational) {
  const auto kg = testutil::random_kg(rng, n, 4, 3 * n);
  const auto perm = testutil::random_perm(rng, n);
  const auto moved = relabel(kg, perm);
  const FeatureMatrix h(testutil::random_unit_rows(rng, static_cast<Eigen::Index>(n), 8));
  return {propagate(build_adjacency(kg, kind).matrix, h, depth),
          propagate(build_adjacency(moved, kind).matrix, permute_rows(h, perm), depth), perm};
}

}  // namespace

TEST_CASE("depth zero returns H") {
  std::mt19937_64 rng(1);
  const FeatureMatrix h(testutil::random_matrix(rng, 10, 3));
  const auto p = propagate(random_sparse(rng, 10, 0.3), h, 0);
  REQUIRE(p.size() == 1);
  CHECK(p[0].values == h.values);
}

TEST_CASE("identity adjacency keeps H at every depth") {
  std::mt19937_64 rng(2);
  const FeatureMatrix h(testutil::random_matrix(rng, 7, 4));
  const auto p = propagate(SparseMatrix::identity(7), h, 5);
  REQUIRE(p.size() == 6);
  for (const auto& m : p) CHECK(m.values == h.values);
}

TEST_CASE("propagation matches dense matrix powers") {
  std::mt19937_64 rng(3);
  const auto a = random_sparse(rng, 30, 0.15);
  const FeatureMatrix h(testutil::random_matrix(rng, 30, 6, -1, 1));
  const auto p = propagate(a, h, 3);
  const RowMatrixD ad = dense(a);
  const RowMatrixD a3h = ad * ad * ad * h.values;
  CHECK((p[3].values - a3h).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(propagate(a, FeatureMatrix(29, 6), 1), DimensionError);
  CHECK_THROWS_AS(propagate(a, h, 17), ConfigError);
  CHECK_THROWS_AS(propagate(a, h, -1), ConfigError);
}

TEST_CASE("profit matrix against the direct double sum") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto as = random_sparse(rng, 5, 0.4);
    const auto at = random_sparse(rng, 5, 0.4);
    const FeatureMatrix hs(testutil::random_matrix(rng, 5, 3, -1, 1));
    const FeatureMatrix ht(testutil::random_matrix(rng, 5, 3, -1, 1));
    const int depth = trial % 4;
    const auto x = profit_matrix(propagate(as, hs, depth), propagate(at, ht, depth));
    CHECK(x.depth_used == depth);
    CHECK_FALSE(x.is_padded());
    // X_ij = sum_l sum_k (A_s^l H_s)_ik (A_t^l H_t)_jk with powers by repeated products
    const RowMatrixD ds = dense(as);
    const RowMatrixD dt = dense(at);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        double expect = 0.0;
        RowMatrixD ps = RowMatrixD::Identity(5, 5);
        RowMatrixD pt = RowMatrixD::Identity(5, 5);
        for (int l = 0; l <= depth; ++l) {
          for (int k = 0; k < 3; ++k) {
            double s = 0.0;
            double t = 0.0;
            for (int m = 0; m < 5; ++m) {
              s += ps(i, m) * hs.values(m, k);
              t += pt(j, m) * ht.values(m, k);
            }
            expect += s * t;
          }
          ps = ds * ps;
          pt = dt * pt;
        }
        CHECK(std::abs(x.values(i, j) - expect) < 1e-8);
      }
    }
  }
}

TEST_CASE("identical graphs at depth zero: diagonal is the strict row max") {
  std::mt19937_64 rng(5);
  const FeatureMatrix h(testutil::random_unit_rows(rng, 40, 16));
  const auto p = propagate(SparseMatrix(40), h, 0);
  const auto x = profit_matrix(p, p);
  for (Eigen::Index i = 0; i < 40; ++i) {
    CHECK(x.values(i, i) == doctest::Approx(1.0));
    for (Eigen::Index j = 0; j < 40; ++j)
      if (j != i) CHECK(x.values(i, j) < x.values(i, i));
  }
}

TEST_CASE("isomorphic pair: planted column is each row's maximum") {
  std::mt19937_64 rng(6);
  for (const int depth : {0, 1, 2, 3}) {
    const auto inst = iso_instance(rng, 60, depth);
    const auto x = profit_matrix(inst.src, inst.tgt);
    for (Eigen::Index i = 0; i < 60; ++i) {
      Eigen::Index arg = 0;
      x.values.row(i).maxCoeff(&arg);
      CHECK(arg == inst.perm[static_cast<std::size_t>(i)]);
    }
    CHECK(std::abs(objective_value(as_alignment(inst.perm), inst.src, inst.tgt)) < 1e-9);
    auto wrong = inst.perm;
    std::swap(wrong[0], wrong[1]);
    CHECK(objective_value(as_alignment(wrong), inst.src, inst.tgt) > 0.0);
  }
}

TEST_CASE("objective needs a total permutation") {
  std::mt19937_64 rng(7);
  const auto inst = iso_instance(rng, 5, 1);
  AlignmentResult partial = as_alignment(inst.perm);
  partial.mapping[2].reset();
  CHECK_THROWS_AS(objective_value(partial, inst.src, inst.tgt), ValidationError);
  AlignmentResult dup = as_alignment(inst.perm);
  dup.mapping[0] = dup.mapping[1];
  CHECK_THROWS_AS(objective_value(dup, inst.src, inst.tgt), ValidationError);
}

TEST_CASE("n=4: residual argmin equals profit argmax over all 24 permutations") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto as = random_sparse(rng, 4, 0.5);
    const auto at = random_sparse(rng, 4, 0.5);
    const auto ps = propagate(as, FeatureMatrix(testutil::random_matrix(rng, 4, 2, -1, 1)), 2);
    const auto pt = propagate(at, FeatureMatrix(testutil::random_matrix(rng, 4, 2, -1, 1)), 2);
    const auto x = profit_matrix(ps, pt);
    std::vector<EntityIndex> p{0, 1, 2, 3};
    double best_res = 1e300;
    double best_profit = -1e300;
    std::vector<EntityIndex> arg_res;
    std::vector<EntityIndex> arg_profit;
    do {
      const double res = objective_value(as_alignment(p), ps, pt);
      double profit = 0.0;
      for (int i = 0; i < 4; ++i) profit += x.values(i, p[i]);
      if (res < best_res) {
        best_res = res;
        arg_res = p;
      }
      if (profit > best_profit) {
        best_profit = profit;
        arg_profit = p;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    CHECK(arg_res == arg_profit);
  }
}

TEST_CASE("depth additivity") {
  std::mt19937_64 rng(9);
  const auto inst = iso_instance(rng, 30, 3);
  const auto full = profit_matrix(inst.src, inst.tgt);
  const auto less = profit_matrix(std::span(inst.src).first(3), std::span(inst.tgt).first(3));
  const RowMatrixD last = inst.src[3].values * inst.tgt[3].values.transpose();
  CHECK((full.values - less.values - last).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("source relabeling permutes profit rows") {
  std::mt19937_64 rng(10);
  const auto kg = testutil::random_kg(rng, 25, 3, 60);
  const auto kt = testutil::random_kg(rng, 25, 3, 60);
  const FeatureMatrix hs(testutil::random_unit_rows(rng, 25, 4));
  const FeatureMatrix ht(testutil::random_unit_rows(rng, 25, 4));
  const auto q = testutil::random_perm(rng, 25);
  const auto pt = propagate(build_adjacency(kt).matrix, ht, 2);
  const auto x = profit_matrix(propagate(build_adjacency(kg).matrix, hs, 2), pt);
  const auto y = profit_matrix(propagate(build_adjacency(relabel(kg, q)).matrix, permute_rows(hs, q), 2), pt);
  for (int i = 0; i < 25; ++i) CHECK((y.values.row(q[i]) - x.values.row(i)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("strips, weights and bounds") {
  std::mt19937_64 rng(11);
  const auto inst = iso_instance(rng, 50, 2, AdjacencyKind::random_walk);
  const auto whole = profit_matrix(inst.src, inst.tgt);
  const auto strips = profit_matrix(inst.src, inst.tgt, {}, 7);
  CHECK((whole.values - strips.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(whole.values.cwiseAbs().maxCoeff() <= 3.0 + 1e-12);

  const std::vector<double> w{1.0, 0.0, 2.0};
  const auto weighted = profit_matrix(inst.src, inst.tgt, w);
  const RowMatrixD expect = inst.src[0].values * inst.tgt[0].values.transpose() +
                            2.0 * inst.src[2].values * inst.tgt[2].values.transpose();
  CHECK((weighted.values - expect).cwiseAbs().maxCoeff() < 1e-12);

  const std::vector<double> short_w{1.0};
  CHECK_THROWS_AS(profit_matrix(inst.src, inst.tgt, short_w), DimensionError);
  CHECK_THROWS_AS(profit_matrix(std::span(inst.src).first(2), inst.tgt), DimensionError);
}
