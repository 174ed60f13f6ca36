#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "kgalign/kg.hpp"

namespace kgalign {

using RowMatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense |E| x d entity features.
struct FeatureMatrix {
  RowMatrixD values;

  FeatureMatrix() = default;
  explicit FeatureMatrix(RowMatrixD v) : values(std::move(v)) {}
  FeatureMatrix(Eigen::Index rows, Eigen::Index dim) : values(RowMatrixD::Zero(rows, dim)) {}

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

// Scales every non-zero row to unit L2 norm; zero rows stay zero.
void normalize_rows(FeatureMatrix& features);

// Returns rows reordered so that row i moves to perm[i].
FeatureMatrix permute_rows(const FeatureMatrix& features, std::span<const EntityIndex> perm);

// Knobs for the textual channels. Defaults: lowercase, split on underscores,
// unit rows, equal channel weights.
struct FeatureConfig {
  bool lowercase = true;
  bool split_underscores = true;
  bool normalize = true;
  double word_weight = 1.0;
  double char_weight = 1.0;
};

// Bigram -> column, ordered lexicographically by code points.
struct BigramVocabulary {
  std::map<std::u32string, Eigen::Index> columns;

  Eigen::Index size() const { return static_cast<Eigen::Index>(columns.size()); }
};

// Row i is the mean of the vectors of name(i)'s in-vocabulary tokens.
FeatureMatrix word_features(const KnowledgeGraph& kg, const WordVectorTable& table, const FeatureConfig& cfg = {});

struct CharFeatures {
  FeatureMatrix source;
  FeatureMatrix target;
  BigramVocabulary vocabulary;
};

// Character-bigram count vectors over a vocabulary shared by both graphs.
// A one-character name counts as its own token.
CharFeatures char_bigram_features(const KnowledgeGraph& source, const KnowledgeGraph& target,
                                  const FeatureConfig& cfg = {});

// Bigram tokens of a single name after optional case folding.
std::vector<std::u32string> name_bigrams(const std::string& name, bool lowercase);

// [w * word | c * char], then a final row normalization when cfg.normalize.
FeatureMatrix concat_features(const FeatureMatrix& word, const FeatureMatrix& chars, const FeatureConfig& cfg = {});

}  // namespace kgalign
