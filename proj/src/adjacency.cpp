#include "kgalign/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "kgalign/error.hpp"

namespace kgalign {

SparseMatrix SparseMatrix::from_entries(std::size_t size, std::vector<Entry> entries) {
  for (const auto& e : entries) {
    if (e.row >= size || e.col >= size) throw DimensionError("sparse entry out of range");
    if (!std::isfinite(e.weight)) throw ValidationError("non-finite sparse weight");
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(size);
  m.cols_.reserve(entries.size());
  m.weights_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
      m.weights_.back() += e.weight;
      continue;
    }
    m.cols_.push_back(e.col);
    m.weights_.push_back(e.weight);
    ++m.row_ptr_[e.row + 1];
  }
  for (std::size_t i = 0; i < size; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t size) {
  std::vector<Entry> entries;
  entries.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), 1.0});
  }
  return from_entries(size, std::move(entries));
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
  const auto cols = row_cols(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(col));
  if (it == cols.end() || *it != col) return 0.0;
  return row_weights(row)[static_cast<std::size_t>(it - cols.begin())];
}

double SparseMatrix::row_sum(std::size_t row) const {
  double s = 0.0;
  for (const double w : row_weights(row)) s += w;
  return s;
}

SparseMatrix SparseMatrix::permuted(std::span<const EntityIndex> perm) const {
  if (perm.size() != size_) throw DimensionError("permutation size differs from matrix size");
  std::vector<Entry> entries;
  entries.reserve(nnz());
  for (std::size_t i = 0; i < size_; ++i) {
    const auto cols = row_cols(i);
    const auto ws = row_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) entries.push_back({perm[i], perm[cols[k]], ws[k]});
  }
  return from_entries(size_, std::move(entries));
}

AdjacencyKind parse_adjacency_kind(std::string_view s) {
  if (s == "rel" || s == "relational") return AdjacencyKind::relational;
  if (s == "raw") return AdjacencyKind::raw;
  if (s == "rw" || s == "random_walk") return AdjacencyKind::random_walk;
  if (s == "lap" || s == "laplacian") return AdjacencyKind::laplacian;
  throw ConfigError("unknown adjacency kind '" + std::string(s) + "' (expected rel|raw|rw|lap)");
}

std::string_view to_string(AdjacencyKind kind) {
  switch (kind) {
    case AdjacencyKind::raw: return "raw";
    case AdjacencyKind::random_walk: return "rw";
    case AdjacencyKind::laplacian: return "lap";
    case AdjacencyKind::relational: return "rel";
  }
  return "?";
}

namespace {

struct Link {
  EntityIndex from;
  EntityIndex to;
  RelationIndex relation;
  friend auto operator<=>(const Link&, const Link&) = default;
};

// Undirected (i, j, r) links: both directions of each triple, one entry per
// distinct relation between a pair.
std::vector<Link> undirected_links(const KnowledgeGraph& kg) {
  std::vector<Link> links;
  links.reserve(2 * kg.triples.size());
  for (const auto& t : kg.triples) {
    if (t.head == t.tail) continue;
    links.push_back({t.head, t.tail, t.relation});
    links.push_back({t.tail, t.head, t.relation});
  }
  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
  return links;
}

}  // namespace

Adjacency build_adjacency(const KnowledgeGraph& kg, AdjacencyKind kind) {
  const std::size_t n = kg.entity_count;
  const auto links = undirected_links(kg);

  std::vector<double> relation_weight(kg.relation_count, 1.0);
  if (kind == AdjacencyKind::relational) {
    const auto total = static_cast<double>(kg.triple_count());
    for (std::size_t r = 0; r < kg.relation_count; ++r) {
      const auto count = kg.relation_triple_counts[r];
      relation_weight[r] = count > 0 ? std::log(total / static_cast<double>(count)) : 0.0;
    }
  }

  // Collapse relations per (i, j): binary for raw-based kinds, summed
  // ln-weights for the relational kind.
  std::vector<SparseMatrix::Entry> entries;
  entries.reserve(links.size());
  for (std::size_t k = 0; k < links.size();) {
    const auto from = links[k].from;
    const auto to = links[k].to;
    double w = 0.0;
    for (; k < links.size() && links[k].from == from && links[k].to == to; ++k) {
      w += relation_weight[links[k].relation];
    }
    if (kind != AdjacencyKind::relational) w = 1.0;
    entries.push_back({from, to, w});
  }

  // Row totals summed in sorted-weight order, so they do not depend on how
  // neighbors happen to be numbered. A relational row whose neighbors all
  // carry ln 1 = 0 (one relation type overall) takes the equal-weight limit,
  // which is 1/deg.
  std::vector<double> row_total(n, 0.0);
  {
    std::vector<double> ws;
    for (std::size_t k = 0; k < entries.size();) {
      const auto row = entries[k].row;
      const auto begin = k;
      ws.clear();
      for (; k < entries.size() && entries[k].row == row; ++k) ws.push_back(entries[k].weight);
      std::sort(ws.begin(), ws.end());
      double total = 0.0;
      for (const double w : ws) total += w;
      if (total == 0.0 && kind == AdjacencyKind::relational) {
        for (auto j = begin; j < k; ++j) entries[j].weight = 1.0;
        total = static_cast<double>(k - begin);
      }
      row_total[row] = total;
    }
  }

  Adjacency out;
  out.kind = kind;
  for (std::size_t i = 0; i < n; ++i) {
    if (row_total[i] == 0.0) out.isolated.push_back(static_cast<EntityIndex>(i));
  }

  switch (kind) {
    case AdjacencyKind::raw:
      break;
    case AdjacencyKind::random_walk:
    case AdjacencyKind::relational:
      for (auto& e : entries) {
        if (row_total[e.row] > 0.0) e.weight /= row_total[e.row];
      }
      // Drop exact zeros left by ln(1) relations so the pattern stays meaningful.
      std::erase_if(entries, [](const SparseMatrix::Entry& e) { return e.weight == 0.0; });
      break;
    case AdjacencyKind::laplacian: {
      std::vector<double> inv_sqrt(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (row_total[i] > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(row_total[i]);
      }
      for (auto& e : entries) e.weight = -inv_sqrt[e.row] * e.weight * inv_sqrt[e.col];
      for (std::size_t i = 0; i < n; ++i) {
        entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), 1.0});
      }
      break;
    }
  }
  out.matrix = SparseMatrix::from_entries(n, std::move(entries));
  return out;
}

std::vector<double> degree_vector(const SparseMatrix& adj) {
  std::vector<double> deg(adj.size(), 0.0);
  for (std::size_t i = 0; i < adj.size(); ++i) deg[i] = adj.row_sum(i);
  return deg;
}

void write_tsv(const SparseMatrix& adj, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    const auto cols = adj.row_cols(i);
    const auto ws = adj.row_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out << i << '\t' << cols[k] << '\t' << ws[k] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace kgalign
