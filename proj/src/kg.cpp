#include "kgalign/kg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "kgalign/error.hpp"
#include "kgalign/text.hpp"

namespace kgalign {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

// Reads `id\tvalue` lines. The value is everything after the first tab.
std::vector<std::pair<RawId, std::string>> read_id_value_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::pair<RawId, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::strip_cr(line);
    if (is_blank(view)) continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(path.string(), line_no, "expected `id<TAB>value`");
    }
    RawId id = 0;
    if (!parse_number(view.substr(0, tab), id)) {
      throw ParseError(path.string(), line_no, "non-integer id '" + std::string(view.substr(0, tab)) + "'");
    }
    rows.emplace_back(id, text::uri_local_name(view.substr(tab + 1)));
  }
  return rows;
}

}  // namespace

std::optional<EntityIndex> KnowledgeGraph::find_entity(RawId id) const {
  const auto it = entity_lookup_.find(id);
  if (it == entity_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationIndex> KnowledgeGraph::find_relation(RawId id) const {
  const auto it = relation_lookup_.find(id);
  if (it == relation_lookup_.end()) return std::nullopt;
  return it->second;
}

void KnowledgeGraph::reindex() {
  entity_lookup_.clear();
  relation_lookup_.clear();
  entity_lookup_.reserve(entity_ids.size());
  for (std::size_t i = 0; i < entity_ids.size(); ++i) {
    entity_lookup_.emplace(entity_ids[i], static_cast<EntityIndex>(i));
  }
  for (std::size_t r = 0; r < relation_ids.size(); ++r) {
    relation_lookup_.emplace(relation_ids[r], static_cast<RelationIndex>(r));
  }
}

void KnowledgeGraph::validate() const {
  if (entity_ids.size() != entity_count) throw ValidationError("entity id table size mismatch");
  if (relation_ids.size() != relation_count) throw ValidationError("relation id table size mismatch");
  if (relation_triple_counts.size() != relation_count) throw ValidationError("relation count table size mismatch");
  if (!entity_names.empty() && entity_names.size() != entity_count) {
    throw ValidationError("entity name table size mismatch");
  }
  std::vector<std::size_t> counts(relation_count, 0);
  for (std::size_t k = 0; k < triples.size(); ++k) {
    const auto& t = triples[k];
    if (t.head >= entity_count || t.tail >= entity_count) throw ValidationError("triple entity index out of range");
    if (t.relation >= relation_count) throw ValidationError("triple relation index out of range");
    if (k > 0 && !(triples[k - 1] < t)) throw ValidationError("triples not sorted and unique");
    ++counts[t.relation];
  }
  if (counts != relation_triple_counts) throw ValidationError("relation triple counts disagree with triples");
}

KnowledgeGraph build_kg(std::span<const RawTriple> triples, std::span<const RawId> extra_entities) {
  std::vector<RawId> entities(extra_entities.begin(), extra_entities.end());
  std::vector<RawId> relations;
  entities.reserve(entities.size() + 2 * triples.size());
  relations.reserve(triples.size());
  for (const auto& t : triples) {
    entities.push_back(t.head);
    entities.push_back(t.tail);
    relations.push_back(t.relation);
  }
  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
  std::sort(relations.begin(), relations.end());
  relations.erase(std::unique(relations.begin(), relations.end()), relations.end());

  KnowledgeGraph kg;
  kg.entity_count = entities.size();
  kg.relation_count = relations.size();
  kg.entity_ids = std::move(entities);
  kg.relation_ids = std::move(relations);
  kg.reindex();

  kg.triples.reserve(triples.size());
  for (const auto& t : triples) {
    kg.triples.push_back(Triple{*kg.find_entity(t.head), *kg.find_relation(t.relation), *kg.find_entity(t.tail)});
  }
  std::sort(kg.triples.begin(), kg.triples.end());
  kg.triples.erase(std::unique(kg.triples.begin(), kg.triples.end()), kg.triples.end());

  kg.relation_triple_counts.assign(kg.relation_count, 0);
  for (const auto& t : kg.triples) ++kg.relation_triple_counts[t.relation];
  return kg;
}

void attach_names(KnowledgeGraph& kg, std::vector<std::string> names) {
  if (names.size() != kg.entity_count) {
    throw ValidationError("expected " + std::to_string(kg.entity_count) + " names, got " +
                          std::to_string(names.size()));
  }
  kg.entity_names = std::move(names);
}

KnowledgeGraph load_kg(const std::filesystem::path& triples_path,
                       const std::optional<std::filesystem::path>& names_path,
                       const std::optional<std::filesystem::path>& entities_path) {
  std::vector<RawTriple> raw;
  {
    auto in = open_input(triples_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto view = text::strip_cr(line);
      if (is_blank(view)) continue;
      const auto fields = text::split_tabs(view);
      if (fields.size() != 3) {
        throw ParseError(triples_path.string(), line_no,
                         "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
      }
      RawTriple t;
      if (!parse_number(fields[0], t.head) || !parse_number(fields[1], t.relation) ||
          !parse_number(fields[2], t.tail)) {
        throw ParseError(triples_path.string(), line_no, "non-integer field");
      }
      raw.push_back(t);
    }
  }

  std::vector<std::pair<RawId, std::string>> entity_rows;
  std::vector<RawId> extra;
  if (entities_path) {
    entity_rows = read_id_value_file(*entities_path);
    extra.reserve(entity_rows.size());
    for (const auto& [id, value] : entity_rows) extra.push_back(id);
  }

  KnowledgeGraph kg = build_kg(raw, extra);

  if (entities_path || names_path) {
    std::vector<std::string> names(kg.entity_count);
    for (auto& [id, value] : entity_rows) names[*kg.find_entity(id)] = std::move(value);
    if (names_path) {
      for (auto& [id, value] : read_id_value_file(*names_path)) {
        const auto idx = kg.find_entity(id);
        if (!idx) {
          throw ValidationError(names_path->string() + ": unknown entity id " + std::to_string(id));
        }
        names[*idx] = std::move(value);
      }
    }
    attach_names(kg, std::move(names));
  }
  kg.validate();
  return kg;
}

void write_kg(const KnowledgeGraph& kg, const std::filesystem::path& triples_path,
              const std::optional<std::filesystem::path>& names_path) {
  {
    auto out = open_output(triples_path);
    for (const auto& t : kg.triples) {
      out << kg.entity_ids[t.head] << '\t' << kg.relation_ids[t.relation] << '\t' << kg.entity_ids[t.tail] << '\n';
    }
  }
  if (names_path) {
    auto out = open_output(*names_path);
    for (std::size_t i = 0; i < kg.entity_count; ++i) {
      out << kg.entity_ids[i] << '\t' << (kg.has_names() ? kg.entity_names[i] : std::string()) << '\n';
    }
  }
}

KnowledgeGraph relabel(const KnowledgeGraph& kg, std::span<const EntityIndex> perm) {
  if (perm.size() != kg.entity_count) throw DimensionError("permutation size differs from entity count");
  std::vector<bool> seen(kg.entity_count, false);
  for (const auto p : perm) {
    if (p >= kg.entity_count || seen[p]) throw ValidationError("relabel: not a permutation");
    seen[p] = true;
  }
  KnowledgeGraph out;
  out.entity_count = kg.entity_count;
  out.relation_count = kg.relation_count;
  out.relation_ids = kg.relation_ids;
  out.relation_triple_counts = kg.relation_triple_counts;
  out.entity_ids.resize(kg.entity_count);
  if (kg.has_names()) out.entity_names.resize(kg.entity_count);
  for (std::size_t i = 0; i < kg.entity_count; ++i) {
    out.entity_ids[perm[i]] = kg.entity_ids[i];
    if (kg.has_names()) out.entity_names[perm[i]] = kg.entity_names[i];
  }
  out.triples.reserve(kg.triples.size());
  for (const auto& t : kg.triples) out.triples.push_back(Triple{perm[t.head], t.relation, perm[t.tail]});
  std::sort(out.triples.begin(), out.triples.end());
  out.reindex();
  return out;
}

void AlignmentReference::validate() const {
  std::unordered_set<EntityIndex> sources;
  std::unordered_set<EntityIndex> targets;
  for (const auto& p : pairs) {
    if (!sources.insert(p.source).second) {
      throw ValidationError("duplicate source entity " + std::to_string(p.source) + " in reference");
    }
    if (!targets.insert(p.target).second) {
      throw ValidationError("duplicate target entity " + std::to_string(p.target) + " in reference");
    }
  }
}

AlignmentReference load_reference(const std::filesystem::path& path, const KnowledgeGraph& source,
                                  const KnowledgeGraph& target) {
  auto in = open_input(path);
  AlignmentReference ref;
  std::unordered_set<RawId> seen_src;
  std::unordered_set<RawId> seen_tgt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::strip_cr(line);
    if (is_blank(view)) continue;
    const auto fields = text::split_tabs(view);
    if (fields.size() != 2) throw ParseError(path.string(), line_no, "expected 2 tab-separated fields");
    RawId s = 0;
    RawId t = 0;
    if (!parse_number(fields[0], s) || !parse_number(fields[1], t)) {
      throw ParseError(path.string(), line_no, "non-integer field");
    }
    const auto si = source.find_entity(s);
    const auto ti = target.find_entity(t);
    if (!si) throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": unknown source id " + std::to_string(s));
    if (!ti) throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": unknown target id " + std::to_string(t));
    if (!seen_src.insert(s).second) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": duplicate source id " + std::to_string(s));
    }
    if (!seen_tgt.insert(t).second) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": duplicate target id " + std::to_string(t));
    }
    ref.pairs.push_back({*si, *ti});
  }
  return ref;
}

void write_reference(const AlignmentReference& ref, const KnowledgeGraph& source,
                     const KnowledgeGraph& target, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& p : ref.pairs) out << source.entity_ids[p.source] << '\t' << target.entity_ids[p.target] << '\n';
}

void WordVectorTable::insert(const std::string& token, std::span<const double> vec) {
  if (vec.size() != dimension_) throw DimensionError("word vector dimension mismatch");
  const auto it = index_.find(token);
  if (it != index_.end()) {
    std::copy(vec.begin(), vec.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dimension_));
    return;
  }
  index_.emplace(token, index_.size());
  data_.insert(data_.end(), vec.begin(), vec.end());
}

std::optional<std::span<const double>> WordVectorTable::find(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(data_.data() + it->second * dimension_, dimension_);
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::optional<WordVectorTable> table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> vec;
  std::vector<std::string_view> parts;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::strip_cr(line);
    parts.clear();
    std::size_t pos = 0;
    while (pos < view.size()) {
      const auto start = view.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto end = view.find_first_of(" \t", start);
      if (end == std::string_view::npos) end = view.size();
      parts.push_back(view.substr(start, end - start));
      pos = end;
    }
    if (parts.empty()) continue;

    if (line_no == 1 && parts.size() == 2) {
      std::size_t count = 0;
      std::size_t dim = 0;
      if (parse_number(parts[0], count) && parse_number(parts[1], dim)) {
        if (dim == 0) throw ParseError(path.string(), line_no, "header declares dimension 0");
        table.emplace(dim);
        continue;
      }
    }
    if (parts.size() < 2) throw ParseError(path.string(), line_no, "token without vector");
    const std::size_t dim = parts.size() - 1;
    if (!table) table.emplace(dim);
    if (dim != table->dimension()) {
      throw ParseError(path.string(), line_no,
                       "dimension " + std::to_string(dim) + " differs from " + std::to_string(table->dimension()));
    }
    vec.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_number(parts[k + 1], vec[k]) || !std::isfinite(vec[k])) {
        throw ParseError(path.string(), line_no, "bad vector component '" + std::string(parts[k + 1]) + "'");
      }
    }
    table->insert(std::string(parts[0]), vec);
  }
  if (!table) throw ParseError(path.string(), line_no, "no vectors found");
  return std::move(*table);
}

}  // namespace kgalign
