#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgalign/alignment_result.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/score_view.hpp"

namespace kgalign {

struct MetricsReport {
  std::map<int, double> hits;
  std::optional<double> mrr;
  std::optional<double> f1;
  std::size_t pair_count = 0;

  // {"hits@1":..,"hits@10":..,"mrr":..,"f1":..,"pairs":..}; missing values are null.
  std::string to_json() const;
  std::string to_table() const;
};

struct RankOptions {
  std::vector<int> ks{1, 10};
  // Rank only among targets that appear in the reference.
  bool restrict_to_reference_targets = false;
};

// Rank of the true target j in row i: 1 + #{c : s_ic > s_ij} + #{c < j : s_ic == s_ij}.
std::size_t target_rank(const ScoreView& scores, Eigen::Index row, Eigen::Index target,
                        const std::vector<char>* candidate_mask = nullptr);

MetricsReport rank_metrics(const ScoreView& scores, const AlignmentReference& ref, const RankOptions& opts = {});

struct F1Breakdown {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t correct = 0;
  std::size_t emitted = 0;
};

// Precision is taken over emitted pairs whose source is a reference source
// (other sources cannot be judged); recall over all reference pairs.
F1Breakdown f1_score(const AlignmentResult& result, const AlignmentReference& ref);

// Fraction of reference pairs reproduced by the mapping.
double mapping_accuracy(const AlignmentResult& result, const AlignmentReference& ref);

}  // namespace kgalign
