/*
 * Copyright 2026 The ICONS Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

// Command-line front end.  Pipeline stages communicate only through files
// (shards, score tables, JSON reports), so any stage can be rerun or swapped
// for externally produced artifacts.  Every command is deterministic given
// its inputs and seeds: rerunning produces byte-identical outputs.
//
// Exit codes: 0 success, 2 bad command line, 3 validation/format failure,
// 4 I/O failure, 1 anything else.  Errors are emitted to stderr as a single
// JSON object line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "icons/aggregation.hpp"
#include "icons/error.hpp"
#include "icons/influence.hpp"
#include "icons/manifest.hpp"
#include "icons/projection.hpp"
#include "icons/score_table.hpp"
#include "icons/selection.hpp"
#include "icons/shard.hpp"
#include "icons/synthbench.hpp"

namespace {

using icons::Manifest;
using icons::ScoreTable;
using icons::SelectionResult;
using icons::TrainerConfig;

void note(const std::string& line) { std::cout << line << "\n"; }

std::string ratio_label(double ratio) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", ratio);
  return buffer;
}

void write_text_file(const std::filesystem::path& destination,
                     const std::string& text) {
  std::ofstream out(destination, std::ios::trunc);
  if (!out)
    throw icons::IoError("cannot open for write: " + destination.string());
  out << text;
  out.flush();
  if (!out) throw icons::IoError("write failed: " + destination.string());
}

void make_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw icons::IoError("cannot create directory: " + dir.string());
}

// --- gen-synth ---------------------------------------------------------------

struct GenSynthOptions {
  std::string out;
  icons::SyntheticSpec spec;
};

void run_gen_synth(const GenSynthOptions& options) {
  const icons::World world = icons::generate_multitask(options.spec);
  icons::save_world(world, options.out);
  note("wrote world to " + options.out);
}

// --- warmup ------------------------------------------------------------------

struct WarmupOptions {
  std::string world;
  std::string out;
  TrainerConfig trainer;
};

void run_warmup(const WarmupOptions& options) {
  const icons::World world = icons::load_world(options.world);
  const icons::ModelParams params = icons::sgd_warmup(world, options.trainer);
  icons::save_params(params, options.out);
  note("wrote warmup parameters to " + options.out);
}

// --- grads -------------------------------------------------------------------

struct GradsOptions {
  std::string world;
  std::string params;
  std::string out;
};

void run_grads(const GradsOptions& options) {
  const icons::World world = icons::load_world(options.world);
  const icons::ModelParams params = icons::load_params(options.params);
  make_directory(options.out);
  const std::filesystem::path out_dir(options.out);

  const icons::FeatureShard pool_grads =
      icons::gradient_shard(params, world.pool, world.pool_labels);
  icons::write_shard(pool_grads, out_dir / "pool_grads.shard");

  Manifest manifest;
  manifest.feature_dim = pool_grads.dim;
  manifest.normalized = false;
  manifest.train_shards.push_back(
      {"pool_grads.shard", pool_grads.count, 0});
  for (std::uint32_t k = 0; k < world.spec.n_tasks; ++k) {
    const icons::FeatureShard val_grads = icons::gradient_shard(
        params, world.val_features[k], world.val_labels[k]);
    const std::string shard_name =
        "val_" + world.task_names[k] + "_grads.shard";
    icons::write_shard(val_grads, out_dir / shard_name);
    manifest.tasks.push_back(
        {world.task_names[k], shard_name, val_grads.count});
  }
  icons::save_manifest(manifest, out_dir / "manifest.json");
  note("wrote gradient shards and manifest to " + options.out);
}

// --- project -----------------------------------------------------------------

struct ProjectOptions {
  std::string manifest;
  std::string out;
  std::uint32_t proj_dim = 0;
  std::uint64_t seed = 1;
  std::uint64_t block_rows = 256;
};

// Projects one shard block-by-block and row-normalizes the result.
icons::FeatureShard project_file(const std::filesystem::path& source,
                                 const icons::ProjectionSettings& settings,
                                 std::uint64_t block_rows) {
  icons::ShardBlockReader reader(source, block_rows);
  icons::FeatureShard output;
  output.dim = settings.out_dim;
  output.count = reader.count();
  output.base_id = 0;
  output.values.resize(output.count * settings.out_dim);

  icons::FeatureShard block;
  while (reader.next(block)) {
    const icons::FeatureShard projected =
        icons::normalize_rows(icons::project_block(settings, block)).shard;
    std::copy(projected.values.begin(), projected.values.end(),
              output.values.begin() + projected.base_id * settings.out_dim);
  }
  return output;
}

void run_project(const ProjectOptions& options) {
  Manifest manifest = icons::load_manifest(options.manifest);
  if (manifest.normalized)
    throw icons::ValidationError(
        "manifest features are already normalized; project expects raw "
        "gradient shards");

  icons::ProjectionSettings settings;
  settings.seed = options.seed;
  settings.in_dim = manifest.feature_dim;
  settings.out_dim = options.proj_dim;
  settings.family = icons::kSignedFamily;
  icons::validate_projection_settings(settings);

  make_directory(options.out);
  const std::filesystem::path out_dir(options.out);

  Manifest projected = manifest;
  projected.feature_dim = settings.out_dim;
  projected.normalized = true;
  projected.projection = settings;
  for (std::size_t s = 0; s < manifest.train_shards.size(); ++s) {
    icons::write_shard(project_file(manifest.train_shard_path(s), settings,
                                    options.block_rows),
                       out_dir / manifest.train_shards[s].path);
  }
  for (std::size_t t = 0; t < manifest.tasks.size(); ++t) {
    icons::write_shard(project_file(manifest.task_shard_path(t), settings,
                                    options.block_rows),
                       out_dir / manifest.tasks[t].val_shard);
  }
  icons::save_manifest(projected, out_dir / "manifest.json");
  note("wrote projected shards and manifest to " + options.out);
}

// --- influence ---------------------------------------------------------------

struct InfluenceOptions {
  std::string manifest;
  std::string out;
  std::uint64_t block_rows = 256;
};

void run_influence(const InfluenceOptions& options) {
  const Manifest manifest = icons::load_manifest(options.manifest);
  const ScoreTable table =
      icons::build_all_task_scores(manifest, options.block_rows);
  icons::save_score_table(table, options.out);
  note("wrote score table to " + options.out);
}

// --- select / aggregate --------------------------------------------------------

struct SelectOptions {
  std::string table;
  std::string out;
  std::string strategy = "vote";
  std::vector<double> ratios;
  std::uint64_t seed = 0;
};

void run_select(const SelectOptions& options) {
  const ScoreTable table = icons::load_score_table(options.table);
  const icons::Strategy strategy = icons::parse_strategy(options.strategy);
  if (options.ratios.empty())
    throw icons::ValidationError("at least one --ratio is required");
  make_directory(options.out);
  const std::filesystem::path out_dir(options.out);

  for (double ratio : options.ratios) {
    const SelectionResult result =
        icons::select(table, strategy, ratio, options.seed);
    for (const std::string& warning : result.warnings)
      std::cerr << "warning: " << warning << "\n";
    const std::string stem = options.strategy + "_" + ratio_label(ratio);
    icons::save_selection(result, out_dir / (stem + ".ids"),
                          out_dir / (stem + ".json"));
    note("wrote selection " + (out_dir / stem).string() + ".{ids,json}");
  }
}

struct AggregateOptions {
  std::string table;
  std::string out;
  std::string strategy = "vote";
  double ratio = 0.2;
};

// Dry-run view of a strategy: the full preference order with each example's
// key, without producing selection files.
void run_aggregate(const AggregateOptions& options) {
  const ScoreTable table = icons::load_score_table(options.table);
  const icons::Strategy strategy = icons::parse_strategy(options.strategy);

  std::string lines;
  char buffer[64];
  const SelectionResult full = [&] {
    if (strategy == icons::Strategy::vote) {
      // Vote keys depend on the ratio's thresholds; order the whole table.
      const icons::VoteTally tally =
          icons::vote_tally(table, icons::thresholds(table, options.ratio));
      return icons::select_by_votes(tally, table, 1.0);
    }
    return icons::select(table, strategy, 1.0, 0);
  }();
  for (const icons::SelectedExample& pick : full.selected) {
    std::snprintf(buffer, sizeof(buffer), "%llu\t%.17g\n",
                  static_cast<unsigned long long>(pick.id), pick.key);
    lines += buffer;
  }
  write_text_file(options.out, lines);
  note("wrote aggregate keys to " + options.out);
}

// --- stats / overlap -----------------------------------------------------------

struct StatsOptions {
  std::string table;
  std::string out;
  std::vector<double> ratios;
};

void run_stats(const StatsOptions& options) {
  const ScoreTable table = icons::load_score_table(options.table);
  if (options.ratios.empty())
    throw icons::ValidationError("at least one --ratio is required");
  icons::save_vote_stats(
      icons::vote_distribution_stats(table, options.ratios), options.out);
  note("wrote vote statistics to " + options.out);
}

struct OverlapOptions {
  std::string table;
  std::string out;
  std::string selection;  // optional ids file
  double ratio = 0.2;
  std::uint64_t seed = 0;
};

void run_overlap(const OverlapOptions& options) {
  const ScoreTable table = icons::load_score_table(options.table);
  SelectionResult generalist;
  if (options.selection.empty()) {
    generalist =
        icons::select(table, icons::Strategy::vote, options.ratio,
                      options.seed);
  } else {
    generalist.strategy = icons::Strategy::vote;
    generalist.ratio = options.ratio;
    for (std::uint64_t id : icons::load_selection_ids(options.selection))
      generalist.selected.push_back({id, 0.0, 0.0});
    generalist.m = generalist.selected.size();
  }
  icons::save_overlap_report(
      icons::specialist_overlap(table, options.ratio, generalist),
      options.out);
  note("wrote overlap report to " + options.out);
}

// --- eval ----------------------------------------------------------------------

struct EvalOptions {
  std::string world;
  std::string ids;
  std::string out;
  TrainerConfig trainer;
};

void run_eval(const EvalOptions& options) {
  const icons::World world = icons::load_world(options.world);
  const std::vector<std::uint64_t> ids =
      icons::load_selection_ids(options.ids);

  std::vector<std::uint64_t> all_ids(world.pool.count);
  std::iota(all_ids.begin(), all_ids.end(), 0);
  const std::vector<double> full =
      icons::evaluate_subset(world, all_ids, options.trainer);
  const std::vector<double> subset =
      icons::evaluate_subset(world, ids, options.trainer);
  icons::save_eval_report(icons::rel_metric(subset, full, world.task_names),
                          options.out);
  note("wrote evaluation report to " + options.out);
}

void add_trainer_flags(CLI::App* cmd, TrainerConfig* trainer) {
  cmd->add_option("--seed", trainer->seed, "Training seed");
  cmd->add_option("--lr", trainer->learning_rate, "SGD learning rate");
  cmd->add_option("--epochs", trainer->epochs, "SGD epochs");
  cmd->add_option("--warmup-ratio", trainer->warmup_ratio,
                  "Warmup fraction of the pool, in (0, 1]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "icons: gradient-influence data selection with cross-task vote "
      "consensus"};
  app.require_subcommand(1);

  GenSynthOptions gen_synth;
  CLI::App* cmd_gen = app.add_subcommand(
      "gen-synth", "Generate a synthetic multitask world");
  cmd_gen->add_option("--out", gen_synth.out, "Output directory")->required();
  cmd_gen->add_option("--seed", gen_synth.spec.seed, "World seed");
  cmd_gen->add_option("--feature-dim", gen_synth.spec.feature_dim,
                      "Feature dimension");
  cmd_gen->add_option("--classes", gen_synth.spec.n_classes, "Class count");
  cmd_gen->add_option("--tasks", gen_synth.spec.n_tasks, "Task count");
  cmd_gen->add_option("--pool-size", gen_synth.spec.pool_size,
                      "Training pool size");
  cmd_gen->add_option("--val-per-task", gen_synth.spec.val_per_task,
                      "Validation examples per task");
  cmd_gen->add_option("--distractor-fraction",
                      gen_synth.spec.distractor_fraction,
                      "Fraction of pool labels flipped to a wrong class");

  WarmupOptions warmup;
  CLI::App* cmd_warmup =
      app.add_subcommand("warmup", "Train the warmup model on a world");
  cmd_warmup->add_option("--world", warmup.world, "World directory")
      ->required();
  cmd_warmup->add_option("--out", warmup.out, "Output parameter JSON file")
      ->required();
  add_trainer_flags(cmd_warmup, &warmup.trainer);

  GradsOptions grads;
  CLI::App* cmd_grads = app.add_subcommand(
      "grads", "Write per-example gradient shards at a checkpoint");
  cmd_grads->add_option("--world", grads.world, "World directory")->required();
  cmd_grads->add_option("--params", grads.params, "Parameter JSON file")
      ->required();
  cmd_grads->add_option("--out", grads.out, "Output directory")->required();

  ProjectOptions project;
  CLI::App* cmd_project = app.add_subcommand(
      "project", "Project gradient shards and row-normalize them");
  cmd_project->add_option("--manifest", project.manifest, "Input manifest")
      ->required();
  cmd_project->add_option("--out", project.out, "Output directory")
      ->required();
  cmd_project->add_option("--proj-dim", project.proj_dim,
                          "Projected dimension")
      ->required();
  cmd_project->add_option("--seed", project.seed, "Projection seed");
  cmd_project->add_option("--block-rows", project.block_rows,
                          "Streaming block size in rows");

  InfluenceOptions influence;
  CLI::App* cmd_influence = app.add_subcommand(
      "influence", "Build the per-task mean influence score table");
  cmd_influence
      ->add_option("--manifest", influence.manifest,
                   "Manifest of normalized projected shards")
      ->required();
  cmd_influence->add_option("--out", influence.out, "Output score table path")
      ->required();
  cmd_influence->add_option("--block-rows", influence.block_rows,
                            "Streaming block size in rows");

  SelectOptions select;
  CLI::App* cmd_select =
      app.add_subcommand("select", "Select subsets from a score table");
  cmd_select->add_option("--table", select.table, "Score table path")
      ->required();
  cmd_select->add_option("--out", select.out, "Output directory")->required();
  cmd_select->add_option("--strategy", select.strategy,
                         "vote, merge, max, merge-sumnorm, merge-gausnorm, "
                         "roundrobin, or minrank");
  cmd_select->add_option("--ratio", select.ratios,
                         "Selection ratio in (0, 1]; repeatable");
  cmd_select->add_option("--seed", select.seed,
                         "Seed recorded in the report");

  AggregateOptions aggregate;
  CLI::App* cmd_aggregate = app.add_subcommand(
      "aggregate", "Write a strategy's full preference order and keys");
  cmd_aggregate->add_option("--table", aggregate.table, "Score table path")
      ->required();
  cmd_aggregate->add_option("--out", aggregate.out, "Output keys file")
      ->required();
  cmd_aggregate->add_option("--strategy", aggregate.strategy,
                            "Strategy name (as for select)");
  cmd_aggregate->add_option("--ratio", aggregate.ratio,
                            "Threshold ratio used for vote keys");

  StatsOptions stats;
  CLI::App* cmd_stats = app.add_subcommand(
      "stats", "Vote distribution statistics across ratios");
  cmd_stats->add_option("--table", stats.table, "Score table path")
      ->required();
  cmd_stats->add_option("--out", stats.out, "Output JSON file")->required();
  cmd_stats->add_option("--ratio", stats.ratios,
                        "Selection ratio; repeatable");

  OverlapOptions overlap;
  CLI::App* cmd_overlap = app.add_subcommand(
      "overlap", "Per-task and generalist selection overlaps");
  cmd_overlap->add_option("--table", overlap.table, "Score table path")
      ->required();
  cmd_overlap->add_option("--out", overlap.out, "Output JSON file")
      ->required();
  cmd_overlap->add_option("--ratio", overlap.ratio, "Selection ratio");
  cmd_overlap->add_option("--selection", overlap.selection,
                          "Generalist ids file (default: vote selection at "
                          "--ratio)");
  cmd_overlap->add_option("--seed", overlap.seed,
                          "Seed recorded when computing the vote selection");

  EvalOptions eval;
  CLI::App* cmd_eval = app.add_subcommand(
      "eval", "Retrain on a subset and report relative per-task scores");
  cmd_eval->add_option("--world", eval.world, "World directory")->required();
  cmd_eval->add_option("--ids", eval.ids, "Selected ids file")->required();
  cmd_eval->add_option("--out", eval.out, "Output JSON file")->required();
  add_trainer_flags(cmd_eval, &eval.trainer);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::ordered_json error{{"error", e.what()}, {"kind", "config"}};
    std::cerr << error.dump() << "\n";
    return 2;
  }

  try {
    if (*cmd_gen) run_gen_synth(gen_synth);
    if (*cmd_warmup) run_warmup(warmup);
    if (*cmd_grads) run_grads(grads);
    if (*cmd_project) run_project(project);
    if (*cmd_influence) run_influence(influence);
    if (*cmd_select) run_select(select);
    if (*cmd_aggregate) run_aggregate(aggregate);
    if (*cmd_stats) run_stats(stats);
    if (*cmd_overlap) run_overlap(overlap);
    if (*cmd_eval) run_eval(eval);
    return 0;
  } catch (const icons::IoError& e) {
    nlohmann::ordered_json error{{"error", e.what()}, {"kind", "io"}};
    std::cerr << error.dump() << "\n";
    return 4;
  } catch (const icons::FormatError& e) {
    nlohmann::ordered_json error{{"error", e.what()}, {"kind", "format"}};
    std::cerr << error.dump() << "\n";
    return 3;
  } catch (const icons::ValidationError& e) {
    nlohmann::ordered_json error{{"error", e.what()}, {"kind", "validation"}};
    std::cerr << error.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    nlohmann::ordered_json error{{"error", e.what()}, {"kind", "internal"}};
    std::cerr << error.dump() << "\n";
    return 1;
  }
}
