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

// Desk-scale synthetic benchmark: a multitask Gaussian classification world,
// a tiny softmax-regression model with exact hand-derived per-example
// gradients, and subset evaluation.  It exists so the whole selection
// pipeline — warmup, gradients, projection, influence, voting, selection,
// retraining — can be exercised and verified end to end in seconds.
//
// The world: n_classes class centers are drawn once; pool examples are
// class-conditional Gaussian draws with uniformly random classes, and a
// configurable fraction of pool labels is flipped to a wrong class
// ("distractors" — stand-ins for harmful or noisy training data).  Each of
// the K tasks has its own class-mixture weights and a clean validation set
// drawn from that mixture.  Every random stream is derived from the spec
// seed with a distinct tag, so a spec determines the world bit for bit.

#ifndef ICONS_SYNTHBENCH_HPP_
#define ICONS_SYNTHBENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icons/score_table.hpp"
#include "icons/selection.hpp"
#include "icons/selection_result.hpp"
#include "icons/shard.hpp"

namespace icons {

struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::uint32_t feature_dim = 20;
  std::uint32_t n_classes = 10;
  std::uint32_t n_tasks = 5;
  std::uint64_t pool_size = 2000;
  std::uint64_t val_per_task = 50;
  double distractor_fraction = 0.2;  // in [0, 1)
  // K rows of n_classes mixture weights; empty selects the default ring
  // mixtures (see default_task_mixtures).
  std::vector<std::vector<double>> task_mixtures;
};

// Softmax-regression parameters, float64 throughout.
struct ModelParams {
  std::uint32_t n_classes = 0;
  std::uint32_t feature_dim = 0;
  std::vector<double> weights;  // row-major n_classes x feature_dim
  std::vector<double> bias;     // n_classes
};

// SGD recipe shared by warmup and subset evaluation; batch size is fixed at
// 1 so per-example gradients and training updates are the same object.
struct TrainerConfig {
  double learning_rate = 0.1;
  std::uint32_t epochs = 3;
  double warmup_ratio = 0.05;  // fraction of the pool used for warmup
  std::uint64_t seed = 1;
};

struct World {
  SyntheticSpec spec;  // with task_mixtures materialized
  std::vector<std::string> task_names;
  FeatureShard pool;                           // pool_size x feature_dim
  std::vector<std::uint32_t> pool_labels;      // observed (distractors flipped)
  std::vector<std::uint32_t> pool_true_labels; // ground truth
  std::vector<FeatureShard> val_features;      // per task
  std::vector<std::vector<std::uint32_t>> val_labels;  // per task, clean
};

// Task k's weights peak at class floor(k * n_classes / n_tasks) and decay
// with circular class distance (weight proportional to exp(-d^2/2)), so the
// tasks are distinct but jointly cover every class.
std::vector<std::vector<double>> default_task_mixtures(std::uint32_t n_tasks,
                                                       std::uint32_t n_classes);

void validate_synthetic_spec(const SyntheticSpec& spec);

World generate_multitask(const SyntheticSpec& spec);

// --- Model -----------------------------------------------------------------

ModelParams zero_params(std::uint32_t n_classes, std::uint32_t feature_dim);

// Class probabilities softmax(Wx + b), computed with the max-logit shift.
std::vector<double> softmax_probs(const ModelParams& params, const float* x);

// Cross-entropy loss -log p_label for one example.
double example_loss(const ModelParams& params, const float* x,
                    std::uint32_t label);

// Exact analytic gradient of example_loss, flattened weights-then-bias
// (length n_classes * feature_dim + n_classes).
std::vector<double> per_example_gradient(const ModelParams& params,
                                         const float* x, std::uint32_t label);

// Per-row gradients as a float32 shard (the datastore's currency); row order
// and base_id follow `features`.
FeatureShard gradient_shard(const ModelParams& params,
                            const FeatureShard& features,
                            const std::vector<std::uint32_t>& labels);

// Mean example_loss of `params` over the given pool ids (observed labels).
double subset_mean_loss(const World& world,
                        const std::vector<std::uint64_t>& ids,
                        const ModelParams& params);

// Fraction of rows whose argmax logit (lowest class index on ties) matches
// the label.
double accuracy(const ModelParams& params, const FeatureShard& features,
                const std::vector<std::uint32_t>& labels);

// --- Training --------------------------------------------------------------

// The seed-random warmup subset: first ceil(warmup_ratio * pool) ids of a
// seeded shuffle of the pool.
std::vector<std::uint64_t> warmup_subset(std::uint64_t pool_size,
                                         const TrainerConfig& config);

// Trains a fresh zero-initialized model on exactly `ids` (observed labels),
// batch size 1, one seeded shuffle per epoch.  The visit order depends only
// on config.seed, not on the order of `ids`; duplicate ids are rejected.
// Throws if any parameter goes non-finite (divergence).
ModelParams train_on(const World& world, const std::vector<std::uint64_t>& ids,
                     const TrainerConfig& config);

ModelParams sgd_warmup(const World& world, const TrainerConfig& config);

// Trains on the subset and returns per-task validation accuracy.
std::vector<double> evaluate_subset(const World& world,
                                    const std::vector<std::uint64_t>& ids,
                                    const TrainerConfig& config);

// Uniform random size-m subset (the baseline selections are compared
// against); not one of the registered strategies.
std::vector<std::uint64_t> random_selection(std::uint64_t n, std::uint64_t m,
                                            std::uint64_t seed);

// --- Pipeline --------------------------------------------------------------

// Working dimension the end-to-end run projects gradients down to.  The raw
// gradient dimension is only n_classes*feature_dim + n_classes (210 at
// defaults), so a small sketch suffices.
inline constexpr std::uint32_t kEndToEndProjDim = 64;

struct EndToEndResult {
  World world;
  ModelParams warmup_params;
  ScoreTable table;          // per-task mean influences, pool x tasks
  SelectionResult selection;
  std::vector<double> full_scores;  // per-task accuracy of the full-pool model
  EvalReport report;                // subset vs full, Rel per task and mean
};

// world -> warmup -> pool/validation gradients at the warmup checkpoint ->
// signed projection to kEndToEndProjDim -> row normalization -> score table
// -> selection at `ratio` with `strategy` -> fresh-model retraining on the
// subset -> relative scores.  Bit-reproducible from (spec.seed, trainer.seed).
EndToEndResult end_to_end(const SyntheticSpec& spec,
                          const TrainerConfig& trainer, double ratio,
                          Strategy strategy);

// --- Persistence -----------------------------------------------------------

// Writes <dir>/world.json (spec, names, labels), the pool and validation
// feature shards, and <dir>/manifest.json describing those raw shards.
void save_world(const World& world, const std::filesystem::path& dir);
World load_world(const std::filesystem::path& dir);

void save_params(const ModelParams& params,
                 const std::filesystem::path& destination);
ModelParams load_params(const std::filesystem::path& source);

}  // namespace icons

#endif  // ICONS_SYNTHBENCH_HPP_
