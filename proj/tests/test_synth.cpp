#include <doctest.h>

#include "helpers.hpp"
#include "kgalign/assignment.hpp"
#include "kgalign/dense_io.hpp"
#include "kgalign/error.hpp"
#include "kgalign/evaluation.hpp"
#include "kgalign/propagation.hpp"
#include "kgalign/synth.hpp"

using namespace kgalign;

namespace {

SynthSpec small(std::uint64_t seed) {
  SynthSpec s;
  s.entities = 200;
  s.relations = 8;
  s.triple_density = 3.0;
  s.feature_dim = 16;
  s.seed = seed;
  return s;
}

double hits1(const SynthInstance& inst, Solver solver, int depth = 2) {
  const auto ps = propagate(build_adjacency(inst.source).matrix, inst.source_features, depth);
  const auto pt = propagate(build_adjacency(inst.target).matrix, inst.target_features, depth);
  auto x = profit_matrix(ps, pt);
  if (solver == Solver::hungarian) return mapping_accuracy(solve_hungarian(x), inst.reference);
  const auto s = sinkhorn(std::move(x), SinkhornConfig{});
  return rank_metrics(view_of(s), inst.reference).hits.at(1);
}

}  // namespace

TEST_CASE("parameter validation") {
  SynthSpec s;
  s.entities = 1;
  CHECK_THROWS_AS(generate(s), ConfigError);
  s = {};
  s.structure_noise = 1.5;
  CHECK_THROWS_AS(generate(s), ConfigError);
  s = {};
  s.feature_noise = -0.1;
  CHECK_THROWS_AS(generate(s), ConfigError);
  s = {};
  s.entities = 10;
  s.triple_density = 5.0;  // 50 > 45 pairs
  CHECK_THROWS_AS(generate(s), ConfigError);
  s.triple_density = 4.5;
  CHECK_NOTHROW(generate(s));
}

TEST_CASE("zero noise: adjacency commutes with the planted permutation") {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    const auto inst = generate(small(seed));
    CHECK(inst.source.triple_count() == 600);
    CHECK(inst.target.triple_count() == 600);
    for (const auto kind : {AdjacencyKind::relational, AdjacencyKind::raw, AdjacencyKind::random_walk,
                            AdjacencyKind::laplacian}) {
      CHECK(build_adjacency(inst.target, kind).matrix == build_adjacency(inst.source, kind).matrix.permuted(inst.planted));
    }
    CHECK(inst.target_features.values == permute_rows(inst.source_features, inst.planted).values);
  }
}

TEST_CASE("relation frequencies are skewed") {
  const auto inst = generate(small(4));
  const auto& c = inst.source.relation_triple_counts;
  CHECK(c.front() > 2 * c.back());
}

TEST_CASE("zero noise: objective at the planted permutation is zero") {
  const auto inst = generate(small(5));
  const auto ps = propagate(build_adjacency(inst.source).matrix, inst.source_features, 2);
  const auto pt = propagate(build_adjacency(inst.target).matrix, inst.target_features, 2);
  AlignmentResult planted;
  for (const auto p : inst.planted) planted.mapping.emplace_back(p);
  planted.scores.assign(inst.planted.size(), 0.0);
  CHECK(std::abs(objective_value(planted, ps, pt)) < 1e-9);
}

TEST_CASE("zero noise: both solvers recover the planted permutation") {
  for (const std::uint64_t seed : {10u, 11u, 12u}) {
    const auto inst = generate(small(seed));
    CHECK(hits1(inst, Solver::hungarian) == 1.0);
    CHECK(hits1(inst, Solver::sinkhorn) == 1.0);
  }
}

TEST_CASE("reproducible from the seed") {
  const auto a = generate(small(7));
  const auto b = generate(small(7));
  CHECK(a.source.triples == b.source.triples);
  CHECK(a.target.triples == b.target.triples);
  CHECK(a.planted == b.planted);
  CHECK(a.source_features.values == b.source_features.values);
  CHECK(a.source.entity_names == b.source.entity_names);
  const auto c = generate(small(8));
  CHECK(a.planted != c.planted);
}

TEST_CASE("structure noise rewires the requested fraction") {
  auto spec = small(9);
  spec.structure_noise = 0.25;
  const auto inst = generate(spec);
  CHECK(inst.target.triple_count() == inst.source.triple_count());
  std::size_t kept = 0;
  for (const auto& t : inst.source.triples) {
    const Triple moved{inst.planted[t.head], t.relation, inst.planted[t.tail]};
    kept += std::binary_search(inst.target.triples.begin(), inst.target.triples.end(), moved);
  }
  CHECK(kept == 450);
}

TEST_CASE("hits@1 does not grow with structure noise on average") {
  std::vector<double> means;
  for (const double noise : {0.0, 0.3, 0.6, 0.9}) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto spec = small(100 + seed);
      spec.entities = 100;
      spec.feature_dim = 4;
      spec.feature_noise = 0.5;
      spec.structure_noise = noise;
      sum += hits1(generate(spec), Solver::sinkhorn);
    }
    means.push_back(sum / 10);
  }
  for (std::size_t k = 1; k < means.size(); ++k) CHECK(means[k] <= means[k - 1] + 1e-12);
}

TEST_CASE("write_instance produces loadable files") {
  testutil::TempDir dir("synth");
  auto spec = small(13);
  spec.entities = 50;
  const auto inst = generate(spec);
  write_instance(inst, dir.path());
  for (const char* f : {"triples_1", "triples_2", "ent_ids_1", "ent_ids_2", "ref_ent_ids", "features_1.bin",
                        "features_2.bin", "vectors.txt"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const auto s = load_kg(dir / "triples_1", std::nullopt, dir / "ent_ids_1");
  const auto t = load_kg(dir / "triples_2", std::nullopt, dir / "ent_ids_2");
  CHECK(s.triples == inst.source.triples);
  CHECK(t.triples == inst.target.triples);
  CHECK(s.entity_names == inst.source.entity_names);
  CHECK(load_reference(dir / "ref_ent_ids", s, t).pairs == inst.reference.pairs);
  const auto f = load_features(dir / "features_1.bin");
  CHECK((f.values - inst.source_features.values).cwiseAbs().maxCoeff() < 1e-6);
  // vectors.txt reproduces the features through the word channel
  const auto table = load_word_vectors(dir / "vectors.txt");
  CHECK(table.size() == 50);
  CHECK((word_features(s, table).values - inst.source_features.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rng helpers") {
  SynthRng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.below(7) < 7);
  }
  SynthRng a(5);
  SynthRng b(5);
  for (int k = 0; k < 10; ++k) CHECK(a.normal() == b.normal());
}
