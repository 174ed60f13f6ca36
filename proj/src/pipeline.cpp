#include "kgalign/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "kgalign/error.hpp"
#include "kgalign/propagation.hpp"
#include "kgalign/text.hpp"

namespace kgalign {
namespace fs = std::filesystem;

FeatureChannel parse_channel(std::string_view s) {
  if (s == "word") return FeatureChannel::word;
  if (s == "char") return FeatureChannel::chars;
  if (s == "word+char" || s == "w+c" || s == "word_char") return FeatureChannel::word_char;
  throw ConfigError("unknown channel '" + std::string(s) + "' (expected word|char|word+char)");
}

std::string_view to_string(FeatureChannel c) {
  switch (c) {
    case FeatureChannel::word: return "word";
    case FeatureChannel::chars: return "char";
    case FeatureChannel::word_char: return "word+char";
  }
  return "?";
}

void RunConfig::validate() const {
  PropagationConfig{depth, depth_weights}.validate();
  sinkhorn.validate();
  if (threads && *threads < 1) throw ConfigError("threads must be >= 1");
}

namespace {

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad value '" + value + "' for '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("bad boolean '" + value + "' for '" + key + "'");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Removes files written by a command unless commit() was reached.
class OutputGuard {
 public:
  OutputGuard() = default;
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }
  const fs::path& track(fs::path p) { return written_.emplace_back(std::move(p)); }
  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> written_;
  bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

void apply_threads(const RunConfig& cfg) {
  if (cfg.threads) omp_set_num_threads(*cfg.threads);
}

std::optional<fs::path> existing(const fs::path& p) {
  if (fs::exists(p)) return p;
  return std::nullopt;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "data") {
    cfg.data_dir = value;
  } else if (key == "channel") {
    cfg.channel = parse_channel(value);
  } else if (key == "adjacency") {
    cfg.adjacency = parse_adjacency_kind(value);
  } else if (key == "depth") {
    cfg.depth = parse_value<int>(key, value);
  } else if (key == "depth_weights") {
    cfg.depth_weights.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.depth_weights.push_back(parse_value<double>(key, trim(item)));
  } else if (key == "solver") {
    cfg.solver = parse_solver(value);
  } else if (key == "tau") {
    cfg.sinkhorn.temperature = parse_value<double>(key, value);
  } else if (key == "iters") {
    cfg.sinkhorn.iterations = parse_value<int>(key, value);
  } else if (key == "out") {
    cfg.output_dir = value;
  } else if (key == "threads") {
    cfg.threads = parse_value<int>(key, value);
  } else if (key == "vectors") {
    cfg.vectors_path = fs::path(value);
  } else if (key == "seed") {
    cfg.seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "candidates") {
    if (value == "all") {
      cfg.restrict_candidates = false;
    } else if (value == "ref") {
      cfg.restrict_candidates = true;
    } else {
      throw ConfigError("candidates must be all|ref");
    }
  } else if (key == "lowercase") {
    cfg.features.lowercase = parse_bool(key, value);
  } else if (key == "split_underscores") {
    cfg.features.split_underscores = parse_bool(key, value);
  } else if (key == "normalize") {
    cfg.features.normalize = parse_bool(key, value);
  } else if (key == "word_weight") {
    cfg.features.word_weight = parse_value<double>(key, value);
  } else if (key == "char_weight") {
    cfg.features.char_weight = parse_value<double>(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(path.string(), line_no, "expected key=value");
    out.emplace_back(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

Dataset load_dataset(const RunConfig& cfg) {
  const auto& dir = cfg.data_dir;
  if (dir.empty()) throw ConfigError("no data directory given (--data)");
  std::vector<std::string> missing;
  for (const char* f : {"triples_1", "triples_2"}) {
    if (!fs::exists(dir / f)) missing.push_back((dir / f).string());
  }
  if (!missing.empty()) {
    std::string msg = "missing required input files:";
    for (const auto& m : missing) msg += " " + m;
    msg += " (expected triples_1, triples_2, optional ent_ids_1/2, names_1/2, ref_ent_ids)";
    throw ValidationError(msg);
  }

  // Both feature channels read entity names.
  for (const int side : {1, 2}) {
    const auto s = std::to_string(side);
    if (!fs::exists(dir / ("names_" + s)) && !fs::exists(dir / ("ent_ids_" + s))) {
      throw ValidationError("channel '" + std::string(to_string(cfg.channel)) + "' needs entity names: expected " +
                            (dir / ("names_" + s)).string() + " or " + (dir / ("ent_ids_" + s)).string());
    }
  }

  Dataset data;
  data.source = load_kg(dir / "triples_1", existing(dir / "names_1"), existing(dir / "ent_ids_1"));
  data.target = load_kg(dir / "triples_2", existing(dir / "names_2"), existing(dir / "ent_ids_2"));
  if (fs::exists(dir / "ref_ent_ids")) data.reference = load_reference(dir / "ref_ent_ids", data.source, data.target);

  if (cfg.channel != FeatureChannel::chars) {
    const auto vec_path = cfg.vectors_path ? *cfg.vectors_path : dir / "vectors.txt";
    if (!fs::exists(vec_path)) {
      throw ValidationError("channel '" + std::string(to_string(cfg.channel)) + "' needs word vectors: expected " +
                            vec_path.string() + " (pass --vectors)");
    }
    data.vectors = load_word_vectors(vec_path);
  }
  return data;
}

FeaturePair build_features(const Dataset& data, const RunConfig& cfg) {
  std::optional<FeaturePair> word;
  std::optional<CharFeatures> chars;
  if (cfg.channel != FeatureChannel::chars) {
    if (!data.vectors) throw ValidationError("word channel selected but no word vectors loaded");
    word = FeaturePair{word_features(data.source, *data.vectors, cfg.features),
                       word_features(data.target, *data.vectors, cfg.features)};
  }
  if (cfg.channel != FeatureChannel::word) chars = char_bigram_features(data.source, data.target, cfg.features);

  switch (cfg.channel) {
    case FeatureChannel::word:
      return std::move(*word);
    case FeatureChannel::chars:
      return FeaturePair{std::move(chars->source), std::move(chars->target)};
    case FeatureChannel::word_char:
      return FeaturePair{concat_features(word->source, chars->source, cfg.features),
                         concat_features(word->target, chars->target, cfg.features)};
  }
  throw ConfigError("unknown feature channel");
}

PreparedInputs prepare_inputs(const Dataset& data, const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  PreparedInputs p;
  p.features = build_features(data, cfg);
  p.timing.emplace_back("features", sw.lap());
  p.source_adjacency = build_adjacency(data.source, cfg.adjacency);
  p.target_adjacency = build_adjacency(data.target, cfg.adjacency);
  p.timing.emplace_back("adjacency", sw.lap());
  return p;
}

namespace {

std::vector<FeatureMatrix> select_rows(std::vector<FeatureMatrix> mats, const std::vector<Eigen::Index>& rows) {
  for (auto& m : mats) {
    FeatureMatrix sub(static_cast<Eigen::Index>(rows.size()), m.dim());
    for (std::size_t k = 0; k < rows.size(); ++k) sub.values.row(static_cast<Eigen::Index>(k)) = m.values.row(rows[k]);
    m = std::move(sub);
  }
  return mats;
}

// Lifts an alignment over a row/column subset back to full index space.
AlignmentResult lift(const AlignmentResult& sub, const std::vector<Eigen::Index>& rows,
                     const std::vector<Eigen::Index>& cols, std::size_t full_rows) {
  AlignmentResult out;
  out.solver = sub.solver;
  out.mapping.assign(full_rows, std::nullopt);
  out.scores.assign(full_rows, 0.0);
  for (std::size_t k = 0; k < sub.mapping.size(); ++k) {
    if (!sub.mapping[k]) continue;
    const auto i = static_cast<std::size_t>(rows[k]);
    out.mapping[i] = static_cast<EntityIndex>(cols[*sub.mapping[k]]);
    out.scores[i] = sub.scores[k];
  }
  return out;
}

}  // namespace

PipelineOutput run_prepared(const PreparedInputs& prepared, const std::optional<AlignmentReference>& reference,
                            const RunConfig& cfg) {
  cfg.validate();
  apply_threads(cfg);
  Stopwatch sw;
  PipelineOutput out;
  out.timing = prepared.timing;

  auto prop_s = propagate(prepared.source_adjacency.matrix, prepared.features.source, cfg.depth);
  auto prop_t = propagate(prepared.target_adjacency.matrix, prepared.features.target, cfg.depth);
  out.timing.emplace_back("propagation", sw.lap());

  // Optional restriction to the reference sub-problem.
  const bool restrict = cfg.restrict_candidates && reference.has_value();
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  AlignmentReference local_ref;
  if (restrict) {
    for (std::size_t k = 0; k < reference->pairs.size(); ++k) {
      rows.push_back(reference->pairs[k].source);
      cols.push_back(reference->pairs[k].target);
      local_ref.pairs.push_back({static_cast<EntityIndex>(k), static_cast<EntityIndex>(k)});
    }
    prop_s = select_rows(std::move(prop_s), rows);
    prop_t = select_rows(std::move(prop_t), cols);
  } else if (reference) {
    local_ref = *reference;
  }

  ProfitMatrix x = profit_matrix(prop_s, prop_t, cfg.depth_weights);
  prop_s.clear();
  prop_t.clear();
  if (x.rows() != x.cols()) x = pad_profit(x);
  out.timing.emplace_back("profit", sw.lap());

  AlignmentResult alignment;
  std::optional<MetricsReport> metrics;
  if (cfg.solver == Solver::hungarian) {
    alignment = solve_hungarian(x);
    out.timing.emplace_back("solve", sw.lap());
    if (reference) {
      MetricsReport m;
      m.pair_count = local_ref.pairs.size();
      m.hits[1] = mapping_accuracy(alignment, local_ref);
      m.f1 = f1_score(alignment, local_ref).f1;
      metrics = m;
    }
  } else {
    const auto s = sinkhorn(std::move(x), cfg.sinkhorn);
    out.timing.emplace_back("solve", sw.lap());
    alignment = extract_alignment(view_of(s), Solver::sinkhorn);
    out.timing.emplace_back("extract", sw.lap());
    if (reference) {
      RankOptions opts;
      auto m = rank_metrics(view_of(s), local_ref, opts);
      m.f1 = f1_score(alignment, local_ref).f1;
      metrics = m;
    }
  }
  if (reference) out.timing.emplace_back("evaluate", sw.lap());

  if (restrict) {
    alignment = lift(alignment, rows, cols, static_cast<std::size_t>(prepared.features.source.rows()));
  }
  out.alignment = std::move(alignment);
  out.metrics = std::move(metrics);
  return out;
}

PipelineOutput run_pipeline(const Dataset& data, const RunConfig& cfg) {
  return run_prepared(prepare_inputs(data, cfg), data.reference, cfg);
}

void write_alignment_tsv(const fs::path& path, const AlignmentResult& result, const KnowledgeGraph& source,
                         const KnowledgeGraph& target) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < result.mapping.size(); ++i) {
    if (!result.mapping[i]) continue;
    std::snprintf(buf, sizeof buf, "%.9g", result.scores[i]);
    out << source.entity_ids[i] << '\t' << target.entity_ids[*result.mapping[i]] << '\t' << buf << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

AlignmentResult read_alignment_tsv(const fs::path& path, const KnowledgeGraph& source, const KnowledgeGraph& target) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  AlignmentResult out;
  out.mapping.assign(source.entity_count, std::nullopt);
  out.scores.assign(source.entity_count, 0.0);
  std::vector<char> used(target.entity_count, 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::strip_cr(line);
    if (view.empty()) continue;
    const auto f = text::split_tabs(view);
    if (f.size() != 3) throw ParseError(path.string(), line_no, "expected src<TAB>tgt<TAB>score");
    RawId s = 0;
    RawId t = 0;
    double score = 0.0;
    const auto ok = [](std::string_view field, auto& v) {
      const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      return ec == std::errc() && p == field.data() + field.size();
    };
    if (!ok(f[0], s) || !ok(f[1], t) || !ok(f[2], score)) throw ParseError(path.string(), line_no, "bad field");
    const auto si = source.find_entity(s);
    const auto ti = target.find_entity(t);
    if (!si || !ti) throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": unknown entity id");
    if (out.mapping[*si] || used[*ti]) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": alignment is not one-to-one");
    }
    out.mapping[*si] = *ti;
    out.scores[*si] = score;
    used[*ti] = 1;
  }
  return out;
}

std::string timing_json(const StageTimes& times) {
  nlohmann::ordered_json j;
  double total = 0.0;
  for (const auto& [stage, secs] : times) {
    j[stage] = secs;
    total += secs;
  }
  j["total"] = total;
  return j.dump();
}

int cmd_align(const RunConfig& cfg) {
  cfg.validate();
  apply_threads(cfg);
  Stopwatch sw;
  const auto data = load_dataset(cfg);
  const double load_secs = sw.lap();
  auto result = run_pipeline(data, cfg);
  result.timing.insert(result.timing.begin(), {"load", load_secs});

  fs::create_directories(cfg.output_dir);
  OutputGuard guard;
  write_alignment_tsv(guard.track(cfg.output_dir / "alignment.tsv"), result.alignment, data.source, data.target);
  if (result.metrics) {
    write_text(guard.track(cfg.output_dir / "metrics.json"), result.metrics->to_json() + "\n");
    std::cout << result.metrics->to_json() << '\n' << result.metrics->to_table();
  }
  write_text(guard.track(cfg.output_dir / "timing.json"), timing_json(result.timing) + "\n");
  guard.commit();
  return 0;
}

int cmd_eval(const RunConfig& cfg, const fs::path& alignment_path) {
  const auto& dir = cfg.data_dir;
  if (dir.empty()) throw ConfigError("no data directory given (--data)");
  for (const char* f : {"triples_1", "triples_2", "ref_ent_ids"}) {
    if (!fs::exists(dir / f)) throw ValidationError("missing required input file " + (dir / f).string());
  }
  const auto source = load_kg(dir / "triples_1", std::nullopt, existing(dir / "ent_ids_1"));
  const auto target = load_kg(dir / "triples_2", std::nullopt, existing(dir / "ent_ids_2"));
  const auto ref = load_reference(dir / "ref_ent_ids", source, target);
  const auto alignment = read_alignment_tsv(alignment_path, source, target);

  MetricsReport m;
  m.pair_count = ref.pairs.size();
  m.hits[1] = mapping_accuracy(alignment, ref);
  m.f1 = f1_score(alignment, ref).f1;
  std::cout << m.to_json() << '\n' << m.to_table();
  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    write_text(cfg.output_dir / "metrics.json", m.to_json() + "\n");
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param, const std::vector<double>& values) {
  if (param != "tau" && param != "depth") throw ConfigError("unknown sweep parameter '" + param + "' (expected tau|depth)");
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<RunConfig> runs;
  for (const double v : values) {
    RunConfig c = cfg;
    if (param == "tau") {
      c.sinkhorn.temperature = v;
    } else {
      if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("depth values must be integers");
      c.depth = static_cast<int>(v);
      c.depth_weights.clear();
    }
    c.validate();
    runs.push_back(std::move(c));
  }
  apply_threads(cfg);
  const auto data = load_dataset(cfg);
  if (!data.reference) throw ValidationError("sweep needs a reference alignment (ref_ent_ids)");
  const auto prepared = prepare_inputs(data, cfg);

  std::ostringstream tsv;
  tsv << "param\tvalue\tsolver\thits@1\thits@10\tmrr\tf1\n";
  const auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("nan");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto out = run_prepared(prepared, data.reference, runs[k]);
    const auto& m = *out.metrics;
    const auto hit = [&](int kk) -> std::optional<double> {
      const auto it = m.hits.find(kk);
      if (it == m.hits.end()) return std::nullopt;
      return it->second;
    };
    char vbuf[32];
    std::snprintf(vbuf, sizeof vbuf, "%g", values[k]);
    tsv << param << '\t' << vbuf << '\t' << to_string(runs[k].solver) << '\t' << fmt(hit(1)) << '\t' << fmt(hit(10))
        << '\t' << fmt(m.mrr) << '\t' << fmt(m.f1) << '\n';
  }
  fs::create_directories(cfg.output_dir);
  OutputGuard guard;
  write_text(guard.track(cfg.output_dir / "sweep.tsv"), tsv.str());
  guard.commit();
  std::cout << tsv.str();
  return 0;
}

int cmd_synth(const SynthSpec& spec, const fs::path& out_dir) {
  const auto inst = generate(spec);
  write_instance(inst, out_dir);
  std::cout << "wrote " << spec.entities << "-entity instance (" << inst.source.triple_count() << " / "
            << inst.target.triple_count() << " triples) to " << out_dir.string() << '\n';
  return 0;
}

int cmd_bench(const RunConfig& cfg, int repetitions) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  cfg.validate();
  apply_threads(cfg);

  std::map<std::string, std::map<std::string, std::vector<double>>> samples;  // solver -> stage -> secs
  std::vector<std::string> stage_order;
  for (int rep = 0; rep < repetitions; ++rep) {
    for (const Solver solver : {Solver::sinkhorn, Solver::hungarian}) {
      RunConfig c = cfg;
      c.solver = solver;
      Stopwatch sw;
      const auto data = load_dataset(c);
      const double load_secs = sw.lap();
      auto out = run_pipeline(data, c);
      out.timing.insert(out.timing.begin(), {"load", load_secs});
      double total = 0.0;
      auto& per_stage = samples[std::string(to_string(solver))];
      for (const auto& [stage, secs] : out.timing) {
        per_stage[stage].push_back(secs);
        total += secs;
        if (std::find(stage_order.begin(), stage_order.end(), stage) == stage_order.end()) stage_order.push_back(stage);
      }
      per_stage["total"].push_back(total);
    }
  }
  stage_order.push_back("total");

  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  nlohmann::ordered_json j;
  std::ostringstream table;
  table << "stage        sinkhorn(s)  hungarian(s)\n";
  for (const auto& stage : stage_order) {
    char buf[96];
    std::string cells[2];
    int col = 0;
    for (const char* solver : {"sinkhorn", "hungarian"}) {
      const auto& per_stage = samples[solver];
      const auto it = per_stage.find(stage);
      if (it == per_stage.end()) {
        cells[col++] = "-";
        continue;
      }
      const double med = median(it->second);
      j[solver][stage] = med;
      std::snprintf(buf, sizeof buf, "%.4f", med);
      cells[col++] = buf;
    }
    std::snprintf(buf, sizeof buf, "%-12s %12s %13s\n", stage.c_str(), cells[0].c_str(), cells[1].c_str());
    table << buf;
  }
  j["repetitions"] = repetitions;
  fs::create_directories(cfg.output_dir);
  OutputGuard guard;
  write_text(guard.track(cfg.output_dir / "bench.json"), j.dump() + "\n");
  guard.commit();
  std::cout << table.str();
  return 0;
}

}  // namespace kgalign
