// kgalign command line: align, eval, sweep, synth, bench.
#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "kgalign/error.hpp"
#include "kgalign/pipeline.hpp"

namespace {

// Flags shared by the commands that run the pipeline, stored as raw strings
// so they can be layered over a --config file through apply_setting.
struct RunFlags {
  std::string config;
  std::map<std::string, std::string> values;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "key=value file applied before the flags");
    add(app, "data", "--data", "dataset directory");
    add(app, "channel", "--channel", "word|char|word+char");
    add(app, "adjacency", "--adjacency", "rel|raw|rw|lap");
    add(app, "depth", "--depth", "propagation depth L");
    add(app, "depth_weights", "--depth-weights", "comma-separated weights, one per depth 0..L");
    add(app, "solver", "--solver", "sinkhorn|hungarian");
    add(app, "tau", "--tau", "Sinkhorn temperature");
    add(app, "iters", "--iters", "Sinkhorn iterations");
    add(app, "out", "--out", "output directory");
    add(app, "threads", "--threads", "worker threads");
    add(app, "vectors", "--vectors", "word vector file (default <data>/vectors.txt)");
    add(app, "seed", "--seed", "seed for any randomized step");
    add(app, "candidates", "--candidates", "all|ref: rank against all targets or reference targets only");
  }

  kgalign::RunConfig build() const {
    kgalign::RunConfig cfg;
    if (!config.empty()) {
      for (const auto& [k, v] : kgalign::read_config_file(config)) kgalign::apply_setting(cfg, k, v);
    }
    for (const auto& [k, v] : values) kgalign::apply_setting(cfg, k, v);
    cfg.validate();
    return cfg;
  }

 private:
  void add(CLI::App* app, const std::string& key, const std::string& flag, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-free entity alignment between two knowledge graphs"};
  app.require_subcommand(1);

  RunFlags align_flags;
  auto* align = app.add_subcommand("align", "align two graphs and write alignment.tsv");
  align_flags.add_to(align);

  RunFlags eval_flags;
  std::string alignment_path;
  auto* eval = app.add_subcommand("eval", "score an alignment.tsv against ref_ent_ids");
  eval_flags.add_to(eval);
  eval->add_option("--alignment", alignment_path, "alignment file")->required();

  RunFlags sweep_flags;
  std::string sweep_param;
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "re-run alignment over a list of tau or depth values");
  sweep_flags.add_to(sweep);
  sweep->add_option("--param", sweep_param, "tau|depth")->required();
  sweep->add_option("--values", sweep_values, "values to try")->required()->delimiter(',');

  RunFlags bench_flags;
  int reps = 3;
  auto* bench = app.add_subcommand("bench", "time each stage for both solvers");
  bench_flags.add_to(bench);
  bench->add_option("--reps", reps, "repetitions (median reported)");

  kgalign::SynthSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a planted-permutation instance");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--entities", spec.entities);
  synth->add_option("--relations", spec.relations);
  synth->add_option("--density", spec.triple_density, "triples per entity");
  synth->add_option("--dim", spec.feature_dim);
  synth->add_option("--structure-noise", spec.structure_noise);
  synth->add_option("--feature-noise", spec.feature_noise);
  synth->add_option("--seed", spec.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*align) return kgalign::cmd_align(align_flags.build());
    if (*eval) return kgalign::cmd_eval(eval_flags.build(), alignment_path);
    if (*sweep) return kgalign::cmd_sweep(sweep_flags.build(), sweep_param, sweep_values);
    if (*bench) return kgalign::cmd_bench(bench_flags.build(), reps);
    if (*synth) return kgalign::cmd_synth(spec, synth_out);
  } catch (const kgalign::Error& e) {
    std::cerr << "kgalign: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "kgalign: internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
