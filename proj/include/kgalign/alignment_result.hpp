#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "kgalign/kg.hpp"

namespace kgalign {

enum class Solver { hungarian, sinkhorn };

Solver parse_solver(std::string_view s);
std::string_view to_string(Solver s);

// One-to-one partial mapping from source to target entities. mapping[i] is
// empty when source i was matched to a padding column or left unmatched.
struct AlignmentResult {
  std::vector<std::optional<EntityIndex>> mapping;
  std::vector<double> scores;
  Solver solver = Solver::hungarian;

  std::size_t matched_count() const;
  bool is_total() const { return matched_count() == mapping.size(); }
};

}  // namespace kgalign
