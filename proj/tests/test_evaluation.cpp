#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "kgalign/error.hpp"
#include "kgalign/evaluation.hpp"

using namespace kgalign;
using testutil::as_profit;

namespace {

AlignmentReference diag_ref(std::size_t n) {
  AlignmentReference r;
  for (std::size_t i = 0; i < n; ++i) r.pairs.push_back({static_cast<EntityIndex>(i), static_cast<EntityIndex>(i)});
  return r;
}

AlignmentResult mapping(std::vector<std::optional<EntityIndex>> m) {
  AlignmentResult r;
  r.scores.assign(m.size(), 0.0);
  r.mapping = std::move(m);
  return r;
}

}  // namespace

TEST_CASE("identity scores give perfect metrics") {
  const auto x = as_profit(RowMatrixD::Identity(5, 5));
  const auto m = rank_metrics(view_of(x), diag_ref(5));
  CHECK(m.hits.at(1) == 1.0);
  CHECK(m.hits.at(10) == 1.0);
  CHECK(*m.mrr == 1.0);
  CHECK(m.pair_count == 5);
}

TEST_CASE("ranks 1 and 2") {
  const auto x = as_profit(RowMatrixD{{0.9, 0.1}, {0.8, 0.2}});
  const auto m = rank_metrics(view_of(x), diag_ref(2));
  CHECK(m.hits.at(1) == 0.5);
  CHECK(*m.mrr == 0.75);
}

TEST_CASE("ties: lower column first") {
  const auto x = as_profit(RowMatrixD{{0.5, 0.5, 0.5}});
  CHECK(target_rank(view_of(x), 0, 0) == 1);
  CHECK(target_rank(view_of(x), 0, 2) == 3);
}

TEST_CASE("restriction to reference targets") {
  const auto x = as_profit(RowMatrixD{{0.2, 0.9, 0.5}, {0.1, 0.0, 0.8}});
  AlignmentReference ref;
  ref.pairs = {{0, 0}, {1, 2}};
  const auto all = rank_metrics(view_of(x), ref);
  RankOptions opts;
  opts.restrict_to_reference_targets = true;
  const auto sub = rank_metrics(view_of(x), ref, opts);
  CHECK(all.hits.at(1) == 0.5);
  CHECK(*all.mrr == doctest::Approx((1.0 / 3 + 1.0) / 2));
  CHECK(*sub.mrr == doctest::Approx((0.5 + 1.0) / 2));
}

TEST_CASE("out of range reference") {
  const auto x = as_profit(RowMatrixD::Identity(2, 2));
  AlignmentReference ref;
  ref.pairs = {{2, 0}};
  CHECK_THROWS_AS(rank_metrics(view_of(x), ref), DimensionError);
  ref.pairs = {{0, 5}};
  CHECK_THROWS_AS(rank_metrics(view_of(x), ref), DimensionError);
}

TEST_CASE("ranks agree with a full sort") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    RowMatrixD s = testutil::random_matrix(rng, 50, 50);
    if (trial % 2) s = (s * 4).array().round().matrix();  // heavy ties
    const auto perm = testutil::random_perm(rng, 50);
    AlignmentReference ref;
    for (std::size_t i = 0; i < 50; ++i) ref.pairs.push_back({static_cast<EntityIndex>(i), perm[i]});
    const auto m = rank_metrics(view_of(as_profit(s)), ref, RankOptions{{1, 5, 10}, false});
    double h1 = 0, h5 = 0, h10 = 0, mrr = 0;
    for (int i = 0; i < 50; ++i) {
      std::vector<int> order(50);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s(i, a) > s(i, b); });
      const int rank = static_cast<int>(std::find(order.begin(), order.end(), static_cast<int>(perm[i])) - order.begin()) + 1;
      h1 += rank <= 1;
      h5 += rank <= 5;
      h10 += rank <= 10;
      mrr += 1.0 / rank;
      CHECK(target_rank(view_of(as_profit(s)), i, perm[i]) == static_cast<std::size_t>(rank));
    }
    CHECK(m.hits.at(1) == doctest::Approx(h1 / 50));
    CHECK(m.hits.at(5) == doctest::Approx(h5 / 50));
    CHECK(m.hits.at(10) == doctest::Approx(h10 / 50));
    CHECK(*m.mrr == doctest::Approx(mrr / 50));
    CHECK(*m.mrr >= m.hits.at(1));
    CHECK(*m.mrr <= 1.0);
    CHECK(m.hits.at(1) <= m.hits.at(10));
  }
}

TEST_CASE("metrics do not change under consistent relabeling") {
  std::mt19937_64 rng(2);
  const RowMatrixD s = testutil::random_matrix(rng, 30, 30);
  AlignmentReference ref;
  const auto truth = testutil::random_perm(rng, 30);
  for (std::size_t i = 0; i < 20; ++i) ref.pairs.push_back({static_cast<EntityIndex>(i), truth[i]});
  const auto p = testutil::random_perm(rng, 30);
  const auto q = testutil::random_perm(rng, 30);
  RowMatrixD t(30, 30);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) t(p[i], q[j]) = s(i, j);
  AlignmentReference moved;
  for (const auto& pr : ref.pairs) moved.pairs.push_back({p[pr.source], q[pr.target]});
  const auto a = rank_metrics(view_of(as_profit(s)), ref);
  const auto b = rank_metrics(view_of(as_profit(t)), moved);
  CHECK(a.hits == b.hits);
  CHECK(*a.mrr == doctest::Approx(*b.mrr));
}

TEST_CASE("f1") {
  const auto ref = diag_ref(4);
  const auto perfect = f1_score(mapping({0u, 1u, 2u, 3u}), ref);
  CHECK(perfect.f1 == 1.0);

  const auto half = f1_score(mapping({0u, 1u, std::nullopt, std::nullopt}), ref);
  CHECK(half.precision == 1.0);
  CHECK(half.recall == 0.5);
  CHECK(half.f1 == doctest::Approx(2.0 / 3));

  const auto wrong = f1_score(mapping({1u, 0u, 2u, 3u}), ref);
  CHECK(wrong.f1 == 0.5);
  CHECK(mapping_accuracy(mapping({1u, 0u, 2u, 3u}), ref) == 0.5);

  const auto none = f1_score(mapping({std::nullopt, std::nullopt, std::nullopt, std::nullopt}), ref);
  CHECK(none.f1 == 0.0);

  // Non-reference sources are not judged.
  AlignmentReference sub;
  sub.pairs = {{0, 0}, {1, 1}};
  const auto extra = f1_score(mapping({0u, 1u, 3u, 2u}), sub);
  CHECK(extra.precision == 1.0);
  CHECK(extra.f1 == 1.0);
}

TEST_CASE("total one-to-one: f1 equals accuracy") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto perm = testutil::random_perm(rng, 40);
    std::vector<std::optional<EntityIndex>> m(perm.begin(), perm.end());
    const auto ref = diag_ref(40);
    CHECK(f1_score(mapping(m), ref).f1 == doctest::Approx(mapping_accuracy(mapping(m), ref)));
  }
}

TEST_CASE("json and table") {
  MetricsReport m;
  m.hits = {{1, 0.5}, {10, 0.75}};
  m.mrr = 0.6;
  m.pair_count = 4;
  const auto j = nlohmann::json::parse(m.to_json());
  CHECK(j["hits@1"] == 0.5);
  CHECK(j["hits@10"] == 0.75);
  CHECK(j["mrr"] == 0.6);
  CHECK(j["f1"].is_null());
  CHECK(j["pairs"] == 4);
  CHECK(m.to_json().find('\n') == std::string::npos);
  CHECK(m.to_json().rfind("{\"hits@1\"", 0) == 0);
  CHECK(m.to_table().find("hits@10") != std::string::npos);
}
