#include "kgalign/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <unordered_set>

#include "kgalign/dense_io.hpp"
#include "kgalign/error.hpp"

namespace kgalign {

double SynthRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SynthRng::below(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double SynthRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void SynthSpec::validate() const {
  if (entities < 2) throw ConfigError("synth: need at least 2 entities");
  if (relations < 1) throw ConfigError("synth: need at least 1 relation");
  if (feature_dim < 1) throw ConfigError("synth: feature_dim must be positive");
  if (!(triple_density >= 0.0) || !std::isfinite(triple_density)) throw ConfigError("synth: bad triple density");
  if (!(structure_noise >= 0.0 && structure_noise <= 1.0)) throw ConfigError("synth: structure_noise must be in [0, 1]");
  if (!(feature_noise >= 0.0 && feature_noise <= 1.0)) throw ConfigError("synth: feature_noise must be in [0, 1]");
  const double pairs = 0.5 * static_cast<double>(entities) * static_cast<double>(entities - 1);
  if (std::round(triple_density * static_cast<double>(entities)) > pairs) {
    throw ConfigError("synth: triple density too high for a simple graph on " + std::to_string(entities) + " entities");
  }
}

namespace {

struct TripleKeyHash {
  std::size_t operator()(const RawTriple& t) const {
    std::uint64_t h = static_cast<std::uint64_t>(t.head) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(t.relation) + 0x7F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(t.tail) + 0x9E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};
struct TripleKeyEq {
  bool operator()(const RawTriple& a, const RawTriple& b) const {
    return a.head == b.head && a.relation == b.relation && a.tail == b.tail;
  }
};
using TripleSet = std::unordered_set<RawTriple, TripleKeyHash, TripleKeyEq>;

class RelationSampler {
 public:
  explicit RelationSampler(std::size_t m) : cdf_(m) {
    double total = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      total += 1.0 / static_cast<double>(r + 1);
      cdf_[r] = total;
    }
    for (auto& c : cdf_) c /= total;
  }
  RawId operator()(SynthRng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<RawId>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1));
  }

 private:
  std::vector<double> cdf_;
};

// Uniform triple over ordered entity pairs with head != tail, raw ids offset by `base`.
RawTriple random_triple(SynthRng& rng, std::size_t n, RawId base, const RelationSampler& rel) {
  const auto h = rng.below(n);
  auto t = rng.below(n - 1);
  if (t >= h) ++t;
  return {base + static_cast<RawId>(h), rel(rng), base + static_cast<RawId>(t)};
}

std::string random_name(SynthRng& rng) {
  std::string s(10, 'a');
  for (auto& c : s) c = static_cast<char>('a' + rng.below(26));
  return s;
}

}  // namespace

SynthInstance generate(const SynthSpec& spec) {
  spec.validate();
  SynthRng rng(spec.seed);
  const std::size_t n = spec.entities;
  const auto target_triples = static_cast<std::size_t>(std::round(spec.triple_density * static_cast<double>(n)));
  const RelationSampler rel(spec.relations);

  std::vector<RawTriple> src;
  src.reserve(target_triples);
  TripleSet src_set;
  while (src.size() < target_triples) {
    const auto t = random_triple(rng, n, 0, rel);
    if (src_set.insert(t).second) src.push_back(t);
  }

  std::vector<EntityIndex> planted(n);
  for (std::size_t i = 0; i < n; ++i) planted[i] = static_cast<EntityIndex>(i);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(planted[i], planted[rng.below(i + 1)]);

  const auto tbase = static_cast<RawId>(n);
  std::vector<RawTriple> tgt;
  tgt.reserve(src.size());
  for (const auto& t : src) {
    tgt.push_back({tbase + planted[static_cast<std::size_t>(t.head)], t.relation,
                   tbase + planted[static_cast<std::size_t>(t.tail)]});
  }
  if (spec.structure_noise > 0.0 && !tgt.empty()) {
    const auto rewire = static_cast<std::size_t>(std::round(spec.structure_noise * static_cast<double>(tgt.size())));
    // Move a random subset of `rewire` triples to the back and drop it.
    for (std::size_t k = 0; k < rewire; ++k) {
      const auto pick = k + rng.below(tgt.size() - k);
      std::swap(tgt[k], tgt[pick]);
    }
    TripleSet kept(tgt.begin() + static_cast<std::ptrdiff_t>(rewire), tgt.end());
    std::vector<RawTriple> removed(tgt.begin(), tgt.begin() + static_cast<std::ptrdiff_t>(rewire));
    TripleSet removed_set(removed.begin(), removed.end());
    tgt.erase(tgt.begin(), tgt.begin() + static_cast<std::ptrdiff_t>(rewire));
    std::size_t added = 0;
    while (added < rewire) {
      const auto t = random_triple(rng, n, tbase, rel);
      if (kept.contains(t) || removed_set.contains(t)) continue;
      kept.insert(t);
      tgt.push_back(t);
      ++added;
    }
  }

  std::vector<RawId> src_ids(n);
  std::vector<RawId> tgt_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    src_ids[i] = static_cast<RawId>(i);
    tgt_ids[i] = tbase + static_cast<RawId>(i);
  }

  SynthInstance inst;
  inst.source = build_kg(src, src_ids);
  inst.target = build_kg(tgt, tgt_ids);
  inst.planted = planted;

  const auto d = static_cast<Eigen::Index>(spec.feature_dim);
  inst.source_features = FeatureMatrix(static_cast<Eigen::Index>(n), d);
  inst.target_features = FeatureMatrix(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = inst.source_features.values.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index k = 0; k < d; ++k) row[k] = rng.normal();
    row /= row.norm();
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto out = inst.target_features.values.row(planted[i]);
    out = inst.source_features.values.row(static_cast<Eigen::Index>(i));
    if (spec.feature_noise > 0.0) {
      for (Eigen::Index k = 0; k < d; ++k) out[k] += spec.feature_noise * rng.normal();
      const double norm = out.norm();
      if (norm > 0.0) out /= norm;
    }
  }

  std::set<std::string> used;
  std::vector<std::string> src_names(n);
  std::vector<std::string> tgt_names(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string name;
    do {
      name = random_name(rng);
    } while (!used.insert(name).second);
    src_names[i] = name;
    tgt_names[planted[i]] = spec.feature_noise > 0.0 ? name + "-t" : name;
  }
  attach_names(inst.source, std::move(src_names));
  attach_names(inst.target, std::move(tgt_names));

  inst.reference.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) inst.reference.pairs.push_back({static_cast<EntityIndex>(i), planted[i]});
  return inst;
}

void write_instance(const SynthInstance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_kg(inst.source, dir / "triples_1", dir / "ent_ids_1");
  write_kg(inst.target, dir / "triples_2", dir / "ent_ids_2");
  write_reference(inst.reference, inst.source, inst.target, dir / "ref_ent_ids");
  save_features(dir / "features_1.bin", inst.source_features);
  save_features(dir / "features_2.bin", inst.target_features);

  std::vector<std::string> lines;
  std::set<std::string> written;
  char buf[32];
  const auto emit = [&](const std::string& token, const FeatureMatrix& f, Eigen::Index row) {
    if (!written.insert(token).second) return;
    std::string line = token;
    for (Eigen::Index k = 0; k < f.dim(); ++k) {
      std::snprintf(buf, sizeof buf, " %.17g", f.values(row, k));
      line += buf;
    }
    lines.push_back(std::move(line));
  };
  for (std::size_t i = 0; i < inst.source.entity_count; ++i) {
    emit(inst.source.entity_names[i], inst.source_features, static_cast<Eigen::Index>(i));
  }
  for (std::size_t i = 0; i < inst.target.entity_count; ++i) {
    emit(inst.target.entity_names[i], inst.target_features, static_cast<Eigen::Index>(i));
  }
  std::ofstream out(dir / "vectors.txt", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "vectors.txt").string());
  out << lines.size() << ' ' << inst.source_features.dim() << '\n';
  for (const auto& line : lines) out << line << '\n';
}

}  // namespace kgalign
