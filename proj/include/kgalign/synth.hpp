#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "kgalign/features.hpp"
#include "kgalign/kg.hpp"

namespace kgalign {

// Parameters of a planted-permutation instance.
struct SynthSpec {
  std::size_t entities = 1000;
  std::size_t relations = 20;
  double triple_density = 4.0;  // expected triples per entity
  std::size_t feature_dim = 32;
  double structure_noise = 0.0;  // fraction of target triples deleted and resampled
  double feature_noise = 0.0;    // std-dev of additive Gaussian feature noise
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthInstance {
  KnowledgeGraph source;
  KnowledgeGraph target;
  FeatureMatrix source_features;
  FeatureMatrix target_features;
  AlignmentReference reference;
  // source index -> target index
  std::vector<EntityIndex> planted;
};

// Deterministic in spec.seed. Source triples are uniform over entity pairs
// with Zipf-distributed relations; the target is the relabeled copy under a
// random permutation, then perturbed by the noise settings.
SynthInstance generate(const SynthSpec& spec);

// Writes triples_1/2, ent_ids_1/2 (id<TAB>name), ref_ent_ids, vectors.txt
// (one token per entity name) and features_1/2.bin. Names are chosen so the
// word channel reproduces the generated features.
void write_instance(const SynthInstance& inst, const std::filesystem::path& dir);

// Portable sampling helpers on top of mt19937_64 (whose output sequence is
// fixed by the standard, unlike std:: distributions).
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                       // [0, 1)
  std::uint64_t below(std::uint64_t n);   // [0, n), unbiased
  double normal();                        // standard Gaussian (Box-Muller)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kgalign
