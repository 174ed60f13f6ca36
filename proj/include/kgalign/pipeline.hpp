#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgalign/adjacency.hpp"
#include "kgalign/assignment.hpp"
#include "kgalign/evaluation.hpp"
#include "kgalign/features.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/synth.hpp"

namespace kgalign {

enum class FeatureChannel { word, chars, word_char };

FeatureChannel parse_channel(std::string_view s);
std::string_view to_string(FeatureChannel c);

// Everything one alignment run needs. Defaults are the main setting:
// relational adjacency, depth 2, Sinkhorn with k = 10 and tau = 0.02.
struct RunConfig {
  std::filesystem::path data_dir;
  FeatureChannel channel = FeatureChannel::word_char;
  AdjacencyKind adjacency = AdjacencyKind::relational;
  int depth = 2;
  std::vector<double> depth_weights;
  Solver solver = Solver::sinkhorn;
  SinkhornConfig sinkhorn;
  FeatureConfig features;
  std::filesystem::path output_dir = ".";
  std::optional<int> threads;
  std::optional<std::filesystem::path> vectors_path;
  bool restrict_candidates = false;
  std::uint64_t seed = 0;

  void validate() const;
};

// Applies one `key=value` setting (same keys as the long CLI flags).
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Reads a key=value file; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

struct Dataset {
  KnowledgeGraph source;
  KnowledgeGraph target;
  std::optional<AlignmentReference> reference;
  std::optional<WordVectorTable> vectors;
};

// Loads triples_1/2, ent_ids_1/2, names_1/2 and ref_ent_ids from cfg.data_dir.
Dataset load_dataset(const RunConfig& cfg);

struct FeaturePair {
  FeatureMatrix source;
  FeatureMatrix target;
};

FeaturePair build_features(const Dataset& data, const RunConfig& cfg);

using StageTimes = std::vector<std::pair<std::string, double>>;

struct PipelineOutput {
  AlignmentResult alignment;
  std::optional<MetricsReport> metrics;
  StageTimes timing;
};

// Inputs that sweeps over tau / depth can share.
struct PreparedInputs {
  FeaturePair features;
  Adjacency source_adjacency;
  Adjacency target_adjacency;
  StageTimes timing;
};

PreparedInputs prepare_inputs(const Dataset& data, const RunConfig& cfg);
PipelineOutput run_prepared(const PreparedInputs& prepared, const std::optional<AlignmentReference>& reference,
                            const RunConfig& cfg);
PipelineOutput run_pipeline(const Dataset& data, const RunConfig& cfg);

// `src_id\ttgt_id\tscore` per matched source, ascending source index.
void write_alignment_tsv(const std::filesystem::path& path, const AlignmentResult& result,
                         const KnowledgeGraph& source, const KnowledgeGraph& target);
AlignmentResult read_alignment_tsv(const std::filesystem::path& path, const KnowledgeGraph& source,
                                   const KnowledgeGraph& target);

std::string timing_json(const StageTimes& times);

// Command entry points; all return a process exit status and throw
// kgalign::Error on invalid input.
int cmd_align(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg, const std::filesystem::path& alignment_path);
int cmd_sweep(const RunConfig& cfg, const std::string& param, const std::vector<double>& values);
int cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir);
int cmd_bench(const RunConfig& cfg, int repetitions);

}  // namespace kgalign
