#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgalign {

using EntityIndex = std::uint32_t;
using RelationIndex = std::uint32_t;
using RawId = std::int64_t;

struct Triple {
  EntityIndex head = 0;
  RelationIndex relation = 0;
  EntityIndex tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct RawTriple {
  RawId head = 0;
  RawId relation = 0;
  RawId tail = 0;
};

// A knowledge graph G = (E, R, T) in dense index space.
//
// Raw ids from the input files are densified in ascending order, so index i
// corresponds to entity_ids[i]. Triples are kept sorted and unique.
struct KnowledgeGraph {
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  std::vector<Triple> triples;
  // Per-relation number of stored (directed) triples, |T_r|.
  std::vector<std::size_t> relation_triple_counts;
  // index -> raw id
  std::vector<RawId> entity_ids;
  std::vector<RawId> relation_ids;
  // Empty when the graph was loaded without a names file.
  std::vector<std::string> entity_names;

  std::size_t triple_count() const { return triples.size(); }
  bool has_names() const { return !entity_names.empty(); }

  std::optional<EntityIndex> find_entity(RawId id) const;
  std::optional<RelationIndex> find_relation(RawId id) const;

  // Throws ValidationError describing the first broken invariant.
  void validate() const;

  // Rebuilds the raw id -> index lookups from entity_ids / relation_ids.
  void reindex();

 private:
  std::unordered_map<RawId, EntityIndex> entity_lookup_;
  std::unordered_map<RawId, RelationIndex> relation_lookup_;
};

// Builds a graph from raw-id triples. `extra_entities` adds entities that may
// not appear in any triple (isolated). Exact duplicate triples are dropped.
KnowledgeGraph build_kg(std::span<const RawTriple> triples, std::span<const RawId> extra_entities = {});

// Sets the per-entity names (size must equal entity_count).
void attach_names(KnowledgeGraph& kg, std::vector<std::string> names);

// Loads `h\tr\tt` triples. If `names_path` is given, each line is `id\tname`
// (a URI value falls back to its local name). If `entities_path` is given
// (an ent_ids file), its ids join the entity set even when isolated, and its
// values serve as names unless `names_path` overrides them.
KnowledgeGraph load_kg(const std::filesystem::path& triples_path,
                       const std::optional<std::filesystem::path>& names_path = std::nullopt,
                       const std::optional<std::filesystem::path>& entities_path = std::nullopt);

// Writes triples (raw ids) and, if present, names as `id\tname`.
void write_kg(const KnowledgeGraph& kg, const std::filesystem::path& triples_path,
              const std::optional<std::filesystem::path>& names_path = std::nullopt);

// Returns the graph with entity i moved to index perm[i]. Raw ids and names
// travel with their entities.
KnowledgeGraph relabel(const KnowledgeGraph& kg, std::span<const EntityIndex> perm);

struct AlignmentPair {
  EntityIndex source = 0;
  EntityIndex target = 0;
  friend bool operator==(const AlignmentPair&, const AlignmentPair&) = default;
};

// One-to-one ground truth: sources unique, targets unique, order preserved.
struct AlignmentReference {
  std::vector<AlignmentPair> pairs;

  void validate() const;
};

// Reads `id1\tid2` lines and resolves them in the two graphs.
AlignmentReference load_reference(const std::filesystem::path& path, const KnowledgeGraph& source,
                                  const KnowledgeGraph& target);

void write_reference(const AlignmentReference& ref, const KnowledgeGraph& source,
                     const KnowledgeGraph& target, const std::filesystem::path& path);

// Pre-trained token vectors stored row-major in one flat buffer.
class WordVectorTable {
 public:
  WordVectorTable() = default;
  explicit WordVectorTable(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return index_.size(); }

  // Later inserts of the same token overwrite.
  void insert(const std::string& token, std::span<const double> vec);
  std::optional<std::span<const double>> find(const std::string& token) const;

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

// Text format: optional "count dim" header, then `token v1 ... vd` per line.
WordVectorTable load_word_vectors(const std::filesystem::path& path);

}  // namespace kgalign
