#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgalign/kg.hpp"

namespace kgalign {

// Square row-compressed matrix with double weights.
class SparseMatrix {
 public:
  struct Entry {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    double weight = 0.0;
  };

  SparseMatrix() : row_ptr_(1, 0) {}
  explicit SparseMatrix(std::size_t size) : size_(size), row_ptr_(size + 1, 0) {}

  // Entries may come in any order; duplicates are summed.
  static SparseMatrix from_entries(std::size_t size, std::vector<Entry> entries);
  static SparseMatrix identity(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const std::uint32_t> row_cols(std::size_t row) const {
    return {cols_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
  }
  std::span<const double> row_weights(std::size_t row) const {
    return {weights_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
  }

  // 0 when (row, col) is not stored.
  double at(std::size_t row, std::size_t col) const;
  double row_sum(std::size_t row) const;

  // Applies P A P^T with P given as index mapping i -> perm[i].
  SparseMatrix permuted(std::span<const EntityIndex> perm) const;

  bool operator==(const SparseMatrix& other) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> weights_;
};

enum class AdjacencyKind { raw, random_walk, laplacian, relational };

// Accepts rel|raw|rw|lap and the long names.
AdjacencyKind parse_adjacency_kind(std::string_view s);
std::string_view to_string(AdjacencyKind kind);

struct Adjacency {
  SparseMatrix matrix;
  AdjacencyKind kind = AdjacencyKind::relational;
  // Entities without neighbors; their rows are empty (e_i under laplacian).
  std::vector<EntityIndex> isolated;
};

// Neighborhoods are taken over the undirected union of triple directions;
// self-loop triples are ignored and no self-loops are added.
//   raw:         a_ij = 1 on any edge
//   random_walk: a_ij = 1 / deg(i)
//   laplacian:   I - D^-1/2 A D^-1/2
//   relational:  a_ij = sum_{r in R_ij} ln(|T|/|T_r|), row-normalized;
//                rows whose weights are all zero fall back to 1/deg(i)
Adjacency build_adjacency(const KnowledgeGraph& kg, AdjacencyKind kind = AdjacencyKind::relational);

std::vector<double> degree_vector(const SparseMatrix& adj);

// Debug dump, one `row\tcol\tweight` line per stored entry.
void write_tsv(const SparseMatrix& adj, std::ostream& out);

}  // namespace kgalign
