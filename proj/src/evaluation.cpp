#include "kgalign/evaluation.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <unordered_map>

#include "kgalign/error.hpp"

namespace kgalign {

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  for (const int k : {1, 10}) {
    const auto it = hits.find(k);
    j["hits@" + std::to_string(k)] = it != hits.end() ? nlohmann::ordered_json(it->second) : nlohmann::ordered_json();
  }
  for (const auto& [k, v] : hits) {
    if (k != 1 && k != 10) j["hits@" + std::to_string(k)] = v;
  }
  j["mrr"] = mrr ? nlohmann::ordered_json(*mrr) : nlohmann::ordered_json();
  j["f1"] = f1 ? nlohmann::ordered_json(*f1) : nlohmann::ordered_json();
  j["pairs"] = pair_count;
  return j.dump();
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  char buf[64];
  out << "metric    value\n";
  for (const auto& [k, v] : hits) {
    std::snprintf(buf, sizeof buf, "hits@%-4d %.4f\n", k, v);
    out << buf;
  }
  if (mrr) {
    std::snprintf(buf, sizeof buf, "mrr       %.4f\n", *mrr);
    out << buf;
  }
  if (f1) {
    std::snprintf(buf, sizeof buf, "f1        %.4f\n", *f1);
    out << buf;
  }
  out << "pairs     " << pair_count << '\n';
  return out.str();
}

std::size_t target_rank(const ScoreView& scores, Eigen::Index row, Eigen::Index target,
                        const std::vector<char>* candidate_mask) {
  const double* r = scores.row(row);
  const double s = r[target];
  std::size_t rank = 1;
  for (Eigen::Index c = 0; c < scores.cols; ++c) {
    if (candidate_mask && !(*candidate_mask)[static_cast<std::size_t>(c)]) continue;
    if (r[c] > s || (r[c] == s && c < target)) ++rank;
  }
  return rank;
}

MetricsReport rank_metrics(const ScoreView& scores, const AlignmentReference& ref, const RankOptions& opts) {
  std::vector<char> mask;
  if (opts.restrict_to_reference_targets) mask.assign(static_cast<std::size_t>(scores.cols), 0);
  for (const auto& p : ref.pairs) {
    if (p.source >= scores.rows) throw DimensionError("reference source index out of score range");
    if (p.target >= scores.cols) throw DimensionError("reference target index out of score range");
    if (!mask.empty()) mask[p.target] = 1;
  }
  const auto n = static_cast<std::ptrdiff_t>(ref.pairs.size());
  std::vector<std::size_t> ranks(ref.pairs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto& p = ref.pairs[static_cast<std::size_t>(k)];
    ranks[static_cast<std::size_t>(k)] = target_rank(scores, p.source, p.target, mask.empty() ? nullptr : &mask);
  }

  MetricsReport report;
  report.pair_count = ref.pairs.size();
  double rr = 0.0;
  std::vector<std::size_t> within(opts.ks.size(), 0);
  for (const auto r : ranks) {
    rr += 1.0 / static_cast<double>(r);
    for (std::size_t q = 0; q < opts.ks.size(); ++q) {
      if (r <= static_cast<std::size_t>(opts.ks[q])) ++within[q];
    }
  }
  const double denom = ranks.empty() ? 1.0 : static_cast<double>(ranks.size());
  for (std::size_t q = 0; q < opts.ks.size(); ++q) report.hits[opts.ks[q]] = static_cast<double>(within[q]) / denom;
  report.mrr = ranks.empty() ? 0.0 : rr / denom;
  return report;
}

F1Breakdown f1_score(const AlignmentResult& result, const AlignmentReference& ref) {
  std::unordered_map<EntityIndex, EntityIndex> truth;
  truth.reserve(ref.pairs.size());
  for (const auto& p : ref.pairs) truth.emplace(p.source, p.target);

  F1Breakdown out;
  for (std::size_t i = 0; i < result.mapping.size(); ++i) {
    if (!result.mapping[i]) continue;
    const auto it = truth.find(static_cast<EntityIndex>(i));
    if (it == truth.end()) continue;
    ++out.emitted;
    if (it->second == *result.mapping[i]) ++out.correct;
  }
  out.precision = out.emitted ? static_cast<double>(out.correct) / static_cast<double>(out.emitted) : 0.0;
  out.recall = ref.pairs.empty() ? 0.0 : static_cast<double>(out.correct) / static_cast<double>(ref.pairs.size());
  const double s = out.precision + out.recall;
  out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

double mapping_accuracy(const AlignmentResult& result, const AlignmentReference& ref) {
  if (ref.pairs.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& p : ref.pairs) {
    if (p.source < result.mapping.size() && result.mapping[p.source] == p.target) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ref.pairs.size());
}

}  // namespace kgalign
