#include "kgalign/features.hpp"

#include <cmath>

#include "kgalign/error.hpp"
#include "kgalign/text.hpp"

namespace kgalign {

void normalize_rows(FeatureMatrix& features) {
  auto& m = features.values;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
}

FeatureMatrix permute_rows(const FeatureMatrix& features, std::span<const EntityIndex> perm) {
  if (static_cast<Eigen::Index>(perm.size()) != features.rows()) throw DimensionError("permutation size mismatch");
  FeatureMatrix out(features.rows(), features.dim());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.values.row(perm[i]) = features.values.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

FeatureMatrix word_features(const KnowledgeGraph& kg, const WordVectorTable& table, const FeatureConfig& cfg) {
  if (!kg.has_names()) {
    throw ValidationError("word features need entity names; supply a names file or use the char channel");
  }
  const auto n = static_cast<Eigen::Index>(kg.entity_count);
  const auto d = static_cast<Eigen::Index>(table.dimension());
  FeatureMatrix out(n, d);
#pragma omp parallel for schedule(dynamic, 256)
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& name = kg.entity_names[static_cast<std::size_t>(i)];
    const auto tokens = text::tokenize(cfg.lowercase ? text::to_lower_utf8(name) : name, cfg.split_underscores);
    std::size_t found = 0;
    auto row = out.values.row(i);
    for (const auto& tok : tokens) {
      const auto vec = table.find(tok);
      if (!vec) continue;
      ++found;
      for (Eigen::Index k = 0; k < d; ++k) row[k] += (*vec)[static_cast<std::size_t>(k)];
    }
    if (found > 0) row /= static_cast<double>(found);
  }
  if (cfg.normalize) normalize_rows(out);
  return out;
}

std::vector<std::u32string> name_bigrams(const std::string& name, bool lowercase) {
  auto chars = text::decode_utf8(name);
  if (lowercase) chars = text::to_lower(chars);
  std::vector<std::u32string> grams;
  if (chars.size() == 1) {
    grams.push_back(chars);
    return grams;
  }
  for (std::size_t k = 0; k + 1 < chars.size(); ++k) grams.push_back(chars.substr(k, 2));
  return grams;
}

CharFeatures char_bigram_features(const KnowledgeGraph& source, const KnowledgeGraph& target,
                                  const FeatureConfig& cfg) {
  if (!source.has_names() || !target.has_names()) throw ValidationError("char features need entity names");

  auto all_grams = [&](const KnowledgeGraph& kg) {
    std::vector<std::vector<std::u32string>> grams(kg.entity_count);
    for (std::size_t i = 0; i < kg.entity_count; ++i) grams[i] = name_bigrams(kg.entity_names[i], cfg.lowercase);
    return grams;
  };
  const auto src_grams = all_grams(source);
  const auto tgt_grams = all_grams(target);

  CharFeatures out;
  for (const auto* side : {&src_grams, &tgt_grams}) {
    for (const auto& grams : *side) {
      for (const auto& g : grams) out.vocabulary.columns.emplace(g, 0);
    }
  }
  Eigen::Index col = 0;
  for (auto& [gram, idx] : out.vocabulary.columns) idx = col++;

  auto fill = [&](const std::vector<std::vector<std::u32string>>& grams) {
    FeatureMatrix m(static_cast<Eigen::Index>(grams.size()), out.vocabulary.size());
    for (std::size_t i = 0; i < grams.size(); ++i) {
      for (const auto& g : grams[i]) m.values(static_cast<Eigen::Index>(i), out.vocabulary.columns.at(g)) += 1.0;
    }
    if (cfg.normalize) normalize_rows(m);
    return m;
  };
  out.source = fill(src_grams);
  out.target = fill(tgt_grams);
  return out;
}

FeatureMatrix concat_features(const FeatureMatrix& word, const FeatureMatrix& chars, const FeatureConfig& cfg) {
  if (word.rows() != chars.rows()) {
    throw DimensionError("concat_features: row counts differ (" + std::to_string(word.rows()) + " vs " +
                         std::to_string(chars.rows()) + ")");
  }
  FeatureMatrix out(word.rows(), word.dim() + chars.dim());
  out.values.leftCols(word.dim()) = cfg.word_weight * word.values;
  out.values.rightCols(chars.dim()) = cfg.char_weight * chars.values;
  if (cfg.normalize) normalize_rows(out);
  return out;
}

}  // namespace kgalign
