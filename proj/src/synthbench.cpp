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

#include "icons/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "icons/influence.hpp"
#include "icons/manifest.hpp"
#include "icons/parallel.hpp"
#include "icons/projection.hpp"
#include "icons/rng.hpp"

namespace icons {

namespace {

// Geometry of the synthetic world.  Chosen so the full-pool model is clearly
// better than chance but far from saturated: selection quality then shows up
// as measurable accuracy differences.
constexpr double kCenterScale = 10.0;
constexpr double kNoiseSigma = 1.6;

// Tags for deriving independent random streams from one seed.
enum : std::uint64_t {
  kTagCenters = 1,
  kTagPoolClass = 2,
  kTagPoolNoise = 3,
  kTagDistractorPick = 4,
  kTagDistractorLabel = 5,
  kTagProjection = 6,
  kTagRandomSelect = 7,
  kTagWarmupPick = 8,
  kTagValClassBase = 100,   // + task index
  kTagValNoiseBase = 200,   // + task index
  kTagEpochBase = 1000,     // + epoch index
};

// Class centers: seeded Gaussian directions, Gram-Schmidt orthonormalized
// when the feature dimension allows, then scaled.  Orthonormal centers make
// every class pair equally separated, so no seed produces a degenerate world
// where two classes collapse into each other.
std::vector<double> draw_centers(const SyntheticSpec& spec) {
  const std::uint32_t dim = spec.feature_dim;
  SplitMix64 rng(derive_seed(spec.seed, kTagCenters));
  std::vector<double> centers(static_cast<std::size_t>(spec.n_classes) * dim);
  for (double& v : centers) v = rng.next_normal();

  if (dim >= spec.n_classes) {
    for (std::uint32_t c = 0; c < spec.n_classes; ++c) {
      double* row = centers.data() + static_cast<std::size_t>(c) * dim;
      for (std::uint32_t p = 0; p < c; ++p) {
        const double* prev = centers.data() + static_cast<std::size_t>(p) * dim;
        double dot = 0.0;
        for (std::uint32_t j = 0; j < dim; ++j) dot += row[j] * prev[j];
        for (std::uint32_t j = 0; j < dim; ++j) row[j] -= dot * prev[j];
      }
      double norm = 0.0;
      for (std::uint32_t j = 0; j < dim; ++j) norm += row[j] * row[j];
      norm = std::sqrt(norm);
      if (norm < 1e-9)
        throw Error("degenerate center draw; change the world seed");
      for (std::uint32_t j = 0; j < dim; ++j) row[j] /= norm;
    }
  } else {
    // More classes than dimensions: orthonormalization is impossible; keep
    // unit-scaled random directions.
    for (std::uint32_t c = 0; c < spec.n_classes; ++c) {
      double* row = centers.data() + static_cast<std::size_t>(c) * dim;
      double norm = 0.0;
      for (std::uint32_t j = 0; j < dim; ++j) norm += row[j] * row[j];
      norm = std::sqrt(norm);
      if (norm < 1e-9)
        throw Error("degenerate center draw; change the world seed");
      for (std::uint32_t j = 0; j < dim; ++j) row[j] /= norm;
    }
  }
  for (double& v : centers) v *= kCenterScale;
  return centers;
}

std::uint32_t sample_class(const std::vector<double>& mixture,
                           SplitMix64& rng) {
  double total = 0.0;
  for (double w : mixture) total += w;
  const double u = rng.next_double() * total;
  double cum = 0.0;
  for (std::uint32_t c = 0; c + 1 < mixture.size(); ++c) {
    cum += mixture[c];
    if (u < cum) return c;
  }
  return static_cast<std::uint32_t>(mixture.size() - 1);
}

void fill_example(const std::vector<double>& centers, std::uint32_t label,
                  std::uint32_t dim, SplitMix64& noise, float* out) {
  const double* center = centers.data() + static_cast<std::size_t>(label) * dim;
  for (std::uint32_t j = 0; j < dim; ++j)
    out[j] = static_cast<float>(center[j] + kNoiseSigma * noise.next_normal());
}

void check_labels(const FeatureShard& features,
                  const std::vector<std::uint32_t>& labels,
                  std::uint32_t n_classes) {
  if (labels.size() != features.count)
    throw ValidationError("label count does not match feature rows");
  for (std::uint32_t y : labels)
    if (y >= n_classes) throw ValidationError("label out of class range");
}

void check_params_match(const ModelParams& params, std::uint32_t feature_dim) {
  if (params.feature_dim != feature_dim)
    throw ValidationError("model feature_dim does not match features");
  if (params.weights.size() !=
          static_cast<std::size_t>(params.n_classes) * params.feature_dim ||
      params.bias.size() != params.n_classes)
    throw ValidationError("model parameter shapes are inconsistent");
}

void check_finite(const ModelParams& params, const char* where) {
  for (double v : params.weights)
    if (!std::isfinite(v))
      throw Error(std::string("training diverged (non-finite weight) ") +
                  where);
  for (double v : params.bias)
    if (!std::isfinite(v))
      throw Error(std::string("training diverged (non-finite bias) ") + where);
}

// Sorted, duplicate-free copy of a pool id list.
std::vector<std::uint64_t> canonical_ids(const std::vector<std::uint64_t>& ids,
                                         std::uint64_t pool_size) {
  if (ids.empty()) throw ValidationError("id list is empty");
  std::vector<std::uint64_t> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("id list contains duplicates");
  if (sorted.back() >= pool_size)
    throw ValidationError("id out of pool range");
  return sorted;
}

void check_trainer(const TrainerConfig& config) {
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate))
    throw ValidationError("learning rate must be finite and >= 0");
  if (!(config.warmup_ratio > 0.0) || config.warmup_ratio > 1.0)
    throw ValidationError("warmup ratio must lie in (0, 1]");
}

}  // namespace

std::vector<std::vector<double>> default_task_mixtures(
    std::uint32_t n_tasks, std::uint32_t n_classes) {
  std::vector<std::vector<double>> mixtures(n_tasks);
  for (std::uint32_t k = 0; k < n_tasks; ++k) {
    const std::uint32_t center = k * n_classes / n_tasks;
    // Log-spaced widths: the first task is nearly single-class, the last is
    // broad.  Unequal widths give the tasks genuinely different influence
    // scales, which is what separates calibrated aggregation (votes, ranks)
    // from raw score sums.
    const double width =
        n_tasks > 1
            ? 0.7 * std::pow(6.0, static_cast<double>(k) / (n_tasks - 1))
            : 1.0;
    std::vector<double> weights(n_classes);
    double total = 0.0;
    for (std::uint32_t c = 0; c < n_classes; ++c) {
      const std::uint32_t gap = c > center ? c - center : center - c;
      const double d = std::min<std::uint32_t>(gap, n_classes - gap);
      weights[c] = std::exp(-0.5 * d * d / (width * width));
      total += weights[c];
    }
    for (double& w : weights) w /= total;
    mixtures[k] = std::move(weights);
  }
  return mixtures;
}

void validate_synthetic_spec(const SyntheticSpec& spec) {
  if (spec.feature_dim == 0) throw ValidationError("feature_dim must be >= 1");
  if (spec.n_classes < 2) throw ValidationError("n_classes must be >= 2");
  if (spec.n_tasks == 0) throw ValidationError("n_tasks must be >= 1");
  if (spec.pool_size == 0) throw ValidationError("pool_size must be >= 1");
  if (spec.val_per_task == 0)
    throw ValidationError("val_per_task must be >= 1");
  if (!(spec.distractor_fraction >= 0.0) || spec.distractor_fraction >= 1.0)
    throw ValidationError("distractor_fraction must lie in [0, 1)");
  if (spec.task_mixtures.empty()) return;
  if (spec.task_mixtures.size() != spec.n_tasks)
    throw ValidationError("task_mixtures must have one row per task");
  for (const std::vector<double>& row : spec.task_mixtures) {
    if (row.size() != spec.n_classes)
      throw ValidationError("task mixture row must have n_classes weights");
    double total = 0.0;
    for (double w : row) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ValidationError("task mixture weights must be finite and >= 0");
      total += w;
    }
    if (std::fabs(total - 1.0) > 1e-6)
      throw ValidationError("task mixture weights must sum to 1");
  }
}

World generate_multitask(const SyntheticSpec& spec) {
  validate_synthetic_spec(spec);

  World world;
  world.spec = spec;
  if (world.spec.task_mixtures.empty())
    world.spec.task_mixtures =
        default_task_mixtures(spec.n_tasks, spec.n_classes);
  for (std::uint32_t k = 0; k < spec.n_tasks; ++k)
    world.task_names.push_back("task" + std::to_string(k));

  const std::vector<double> centers = draw_centers(spec);

  // Pool: uniform classes, class-conditional Gaussian features.
  world.pool.dim = spec.feature_dim;
  world.pool.count = spec.pool_size;
  world.pool.base_id = 0;
  world.pool.values.resize(spec.pool_size * spec.feature_dim);
  {
    SplitMix64 class_rng(derive_seed(spec.seed, kTagPoolClass));
    SplitMix64 noise_rng(derive_seed(spec.seed, kTagPoolNoise));
    world.pool_true_labels.resize(spec.pool_size);
    for (std::uint64_t i = 0; i < spec.pool_size; ++i) {
      const auto label =
          static_cast<std::uint32_t>(class_rng.next_below(spec.n_classes));
      world.pool_true_labels[i] = label;
      fill_example(centers, label, spec.feature_dim, noise_rng,
                   world.pool.row(i));
    }
  }

  // Distractors: a seed-chosen subset of the pool gets a uniformly random
  // wrong label.
  world.pool_labels = world.pool_true_labels;
  const auto n_distractors = static_cast<std::uint64_t>(
      std::llround(spec.distractor_fraction *
                   static_cast<double>(spec.pool_size)));
  if (n_distractors > 0) {
    std::vector<std::uint64_t> order(spec.pool_size);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 pick_rng(derive_seed(spec.seed, kTagDistractorPick));
    pick_rng.shuffle(order);
    SplitMix64 label_rng(derive_seed(spec.seed, kTagDistractorLabel));
    for (std::uint64_t d = 0; d < n_distractors; ++d) {
      const std::uint64_t i = order[d];
      auto wrong = static_cast<std::uint32_t>(
          label_rng.next_below(spec.n_classes - 1));
      if (wrong >= world.pool_true_labels[i]) ++wrong;
      world.pool_labels[i] = wrong;
    }
  }

  // Per-task validation sets: mixture-weighted classes, clean labels.
  for (std::uint32_t k = 0; k < spec.n_tasks; ++k) {
    SplitMix64 class_rng(derive_seed(spec.seed, kTagValClassBase + k));
    SplitMix64 noise_rng(derive_seed(spec.seed, kTagValNoiseBase + k));
    FeatureShard features;
    features.dim = spec.feature_dim;
    features.count = spec.val_per_task;
    features.base_id = 0;
    features.values.resize(spec.val_per_task * spec.feature_dim);
    std::vector<std::uint32_t> labels(spec.val_per_task);
    for (std::uint64_t j = 0; j < spec.val_per_task; ++j) {
      labels[j] = sample_class(world.spec.task_mixtures[k], class_rng);
      fill_example(centers, labels[j], spec.feature_dim, noise_rng,
                   features.row(j));
    }
    world.val_features.push_back(std::move(features));
    world.val_labels.push_back(std::move(labels));
  }
  return world;
}

ModelParams zero_params(std::uint32_t n_classes, std::uint32_t feature_dim) {
  ModelParams params;
  params.n_classes = n_classes;
  params.feature_dim = feature_dim;
  params.weights.assign(static_cast<std::size_t>(n_classes) * feature_dim,
                        0.0);
  params.bias.assign(n_classes, 0.0);
  return params;
}

std::vector<double> softmax_probs(const ModelParams& params, const float* x) {
  std::vector<double> logits(params.n_classes);
  for (std::uint32_t c = 0; c < params.n_classes; ++c) {
    const double* w =
        params.weights.data() + static_cast<std::size_t>(c) * params.feature_dim;
    double z = params.bias[c];
    for (std::uint32_t j = 0; j < params.feature_dim; ++j)
      z += w[j] * static_cast<double>(x[j]);
    logits[c] = z;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - top);
    total += z;
  }
  for (double& z : logits) z /= total;
  return logits;
}

double example_loss(const ModelParams& params, const float* x,
                    std::uint32_t label) {
  if (label >= params.n_classes)
    throw ValidationError("label out of class range");
  const std::vector<double> probs = softmax_probs(params, x);
  return -std::log(probs[label]);
}

std::vector<double> per_example_gradient(const ModelParams& params,
                                         const float* x, std::uint32_t label) {
  if (label >= params.n_classes)
    throw ValidationError("label out of class range");
  const std::vector<double> probs = softmax_probs(params, x);

  std::vector<double> grad(static_cast<std::size_t>(params.n_classes) *
                               params.feature_dim +
                           params.n_classes);
  for (std::uint32_t c = 0; c < params.n_classes; ++c) {
    const double delta = probs[c] - (c == label ? 1.0 : 0.0);
    double* w_grad =
        grad.data() + static_cast<std::size_t>(c) * params.feature_dim;
    for (std::uint32_t j = 0; j < params.feature_dim; ++j)
      w_grad[j] = delta * static_cast<double>(x[j]);
    grad[static_cast<std::size_t>(params.n_classes) * params.feature_dim + c] =
        delta;
  }
  return grad;
}

FeatureShard gradient_shard(const ModelParams& params,
                            const FeatureShard& features,
                            const std::vector<std::uint32_t>& labels) {
  check_params_match(params, features.dim);
  check_labels(features, labels, params.n_classes);

  const std::uint64_t grad_dim =
      static_cast<std::uint64_t>(params.n_classes) * params.feature_dim +
      params.n_classes;
  FeatureShard grads;
  grads.dim = static_cast<std::uint32_t>(grad_dim);
  grads.count = features.count;
  grads.base_id = features.base_id;
  grads.values.resize(features.count * grad_dim);

  parallel_for_rows(features.count,
                    [&](std::uint64_t begin, std::uint64_t end) {
                      for (std::uint64_t i = begin; i < end; ++i) {
                        const std::vector<double> g = per_example_gradient(
                            params, features.row(i), labels[i]);
                        float* out = grads.row(i);
                        for (std::uint64_t j = 0; j < grad_dim; ++j)
                          out[j] = static_cast<float>(g[j]);
                      }
                    });
  return grads;
}

double subset_mean_loss(const World& world,
                        const std::vector<std::uint64_t>& ids,
                        const ModelParams& params) {
  const std::vector<std::uint64_t> sorted =
      canonical_ids(ids, world.pool.count);
  double total = 0.0;
  for (std::uint64_t id : sorted)
    total += example_loss(params, world.pool.row(id), world.pool_labels[id]);
  return total / static_cast<double>(sorted.size());
}

double accuracy(const ModelParams& params, const FeatureShard& features,
                const std::vector<std::uint32_t>& labels) {
  check_params_match(params, features.dim);
  check_labels(features, labels, params.n_classes);
  if (features.count == 0) throw ValidationError("empty evaluation set");

  std::uint64_t correct = 0;
  for (std::uint64_t i = 0; i < features.count; ++i) {
    const std::vector<double> probs = softmax_probs(params, features.row(i));
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < params.n_classes; ++c)
      if (probs[c] > probs[best]) best = c;  // ties keep the lowest class
    correct += best == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(features.count);
}

std::vector<std::uint64_t> warmup_subset(std::uint64_t pool_size,
                                         const TrainerConfig& config) {
  check_trainer(config);
  std::vector<std::uint64_t> ids(pool_size);
  std::iota(ids.begin(), ids.end(), 0);
  SplitMix64 rng(derive_seed(config.seed, kTagWarmupPick));
  rng.shuffle(ids);
  ids.resize(selection_size(config.warmup_ratio, pool_size));
  return ids;
}

ModelParams train_on(const World& world, const std::vector<std::uint64_t>& ids,
                     const TrainerConfig& config) {
  check_trainer(config);
  const std::vector<std::uint64_t> base = canonical_ids(ids, world.pool.count);

  ModelParams params =
      zero_params(world.spec.n_classes, world.spec.feature_dim);
  std::vector<std::uint64_t> order;
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    order = base;
    SplitMix64 rng(derive_seed(config.seed, kTagEpochBase + epoch));
    rng.shuffle(order);
    for (std::uint64_t id : order) {
      const std::vector<double> g = per_example_gradient(
          params, world.pool.row(id), world.pool_labels[id]);
      const std::size_t n_weights = params.weights.size();
      for (std::size_t t = 0; t < n_weights; ++t)
        params.weights[t] -= config.learning_rate * g[t];
      for (std::uint32_t c = 0; c < params.n_classes; ++c)
        params.bias[c] -= config.learning_rate * g[n_weights + c];
    }
    check_finite(params, "after an SGD epoch");
  }
  return params;
}

ModelParams sgd_warmup(const World& world, const TrainerConfig& config) {
  return train_on(world, warmup_subset(world.pool.count, config), config);
}

std::vector<double> evaluate_subset(const World& world,
                                    const std::vector<std::uint64_t>& ids,
                                    const TrainerConfig& config) {
  const ModelParams params = train_on(world, ids, config);
  std::vector<double> scores;
  for (std::uint32_t k = 0; k < world.spec.n_tasks; ++k)
    scores.push_back(
        accuracy(params, world.val_features[k], world.val_labels[k]));
  return scores;
}

std::vector<std::uint64_t> random_selection(std::uint64_t n, std::uint64_t m,
                                            std::uint64_t seed) {
  if (m == 0 || m > n)
    throw ValidationError("random selection size must lie in [1, n]");
  std::vector<std::uint64_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  SplitMix64 rng(derive_seed(seed, kTagRandomSelect));
  rng.shuffle(ids);
  ids.resize(m);
  return ids;
}

EndToEndResult end_to_end(const SyntheticSpec& spec,
                          const TrainerConfig& trainer, double ratio,
                          Strategy strategy) {
  EndToEndResult result;
  result.world = generate_multitask(spec);
  const World& world = result.world;
  result.warmup_params = sgd_warmup(world, trainer);

  ProjectionSettings proj;
  proj.seed = derive_seed(spec.seed, kTagProjection);
  proj.in_dim = spec.n_classes * spec.feature_dim + spec.n_classes;
  proj.out_dim = kEndToEndProjDim;
  proj.family = kSignedFamily;

  const FeatureShard pool_features = normalize_rows(
      project_block(proj, gradient_shard(result.warmup_params, world.pool,
                                         world.pool_labels))).shard;

  result.table.n = world.pool.count;
  result.table.k = spec.n_tasks;
  result.table.task_names = world.task_names;
  result.table.scores.resize(result.table.n * result.table.k);
  for (std::uint32_t k = 0; k < spec.n_tasks; ++k) {
    const FeatureShard val_features = normalize_rows(
        project_block(proj, gradient_shard(result.warmup_params,
                                           world.val_features[k],
                                           world.val_labels[k]))).shard;
    const TaskScores scores = task_mean_scores(influence_matrix(
        pool_features, val_features, {}, world.task_names[k]));
    for (std::uint64_t i = 0; i < result.table.n; ++i)
      result.table.at(i, k) = scores.scores[i];
  }

  result.selection = select(result.table, strategy, ratio, spec.seed);

  std::vector<std::uint64_t> all_ids(world.pool.count);
  std::iota(all_ids.begin(), all_ids.end(), 0);
  result.full_scores = evaluate_subset(world, all_ids, trainer);

  std::vector<std::uint64_t> subset_ids;
  for (const SelectedExample& pick : result.selection.selected)
    subset_ids.push_back(pick.id);
  const std::vector<double> subset_scores =
      evaluate_subset(world, subset_ids, trainer);

  result.report = rel_metric(subset_scores, result.full_scores,
                             world.task_names);
  return result;
}

void save_world(const World& world, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir.string());

  write_shard(world.pool, dir / "pool_features.shard");

  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["spec"] = {{"seed", world.spec.seed},
                 {"feature_dim", world.spec.feature_dim},
                 {"n_classes", world.spec.n_classes},
                 {"n_tasks", world.spec.n_tasks},
                 {"pool_size", world.spec.pool_size},
                 {"val_per_task", world.spec.val_per_task},
                 {"distractor_fraction", world.spec.distractor_fraction},
                 {"task_mixtures", world.spec.task_mixtures}};
  doc["task_names"] = world.task_names;
  doc["pool_shard"] = "pool_features.shard";
  doc["pool_labels"] = world.pool_labels;
  doc["pool_true_labels"] = world.pool_true_labels;
  doc["val"] = nlohmann::ordered_json::array();

  Manifest manifest;
  manifest.feature_dim = world.spec.feature_dim;
  manifest.normalized = false;
  manifest.train_shards.push_back(
      {"pool_features.shard", world.pool.count, 0});

  for (std::uint32_t k = 0; k < world.spec.n_tasks; ++k) {
    const std::string shard_name =
        "val_" + world.task_names[k] + "_features.shard";
    write_shard(world.val_features[k], dir / shard_name);
    doc["val"].push_back({{"name", world.task_names[k]},
                          {"shard", shard_name},
                          {"labels", world.val_labels[k]}});
    manifest.tasks.push_back(
        {world.task_names[k], shard_name, world.val_features[k].count});
  }

  std::ofstream out(dir / "world.json", std::ios::trunc);
  if (!out)
    throw IoError("cannot open for write: " + (dir / "world.json").string());
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + (dir / "world.json").string());

  save_manifest(manifest, dir / "manifest.json");
}

World load_world(const std::filesystem::path& dir) {
  const std::filesystem::path doc_path = dir / "world.json";
  std::ifstream in(doc_path);
  if (!in) throw IoError("cannot open: " + doc_path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(FormatIssue::bad_header,
                      "world file is not valid JSON: " + doc_path.string() +
                          ": " + e.what());
  }

  World world;
  try {
    if (doc.at("version").get<int>() != 1)
      throw ValidationError("world file: unsupported version");
    const nlohmann::json& spec = doc.at("spec");
    world.spec.seed = spec.at("seed").get<std::uint64_t>();
    world.spec.feature_dim = spec.at("feature_dim").get<std::uint32_t>();
    world.spec.n_classes = spec.at("n_classes").get<std::uint32_t>();
    world.spec.n_tasks = spec.at("n_tasks").get<std::uint32_t>();
    world.spec.pool_size = spec.at("pool_size").get<std::uint64_t>();
    world.spec.val_per_task = spec.at("val_per_task").get<std::uint64_t>();
    world.spec.distractor_fraction =
        spec.at("distractor_fraction").get<double>();
    world.spec.task_mixtures =
        spec.at("task_mixtures").get<std::vector<std::vector<double>>>();
    world.task_names =
        doc.at("task_names").get<std::vector<std::string>>();
    world.pool = read_shard(dir / doc.at("pool_shard").get<std::string>());
    world.pool_labels =
        doc.at("pool_labels").get<std::vector<std::uint32_t>>();
    world.pool_true_labels =
        doc.at("pool_true_labels").get<std::vector<std::uint32_t>>();
    for (const nlohmann::json& entry : doc.at("val")) {
      world.val_features.push_back(
          read_shard(dir / entry.at("shard").get<std::string>()));
      world.val_labels.push_back(
          entry.at("labels").get<std::vector<std::uint32_t>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("world file is malformed: " + doc_path.string() +
                          ": " + e.what());
  }

  validate_synthetic_spec(world.spec);
  if (world.task_names.size() != world.spec.n_tasks ||
      world.val_features.size() != world.spec.n_tasks ||
      world.val_labels.size() != world.spec.n_tasks)
    throw ValidationError("world file task lists are inconsistent");
  if (world.pool.count != world.spec.pool_size)
    throw ValidationError("world pool shard disagrees with spec pool_size");
  check_labels(world.pool, world.pool_labels, world.spec.n_classes);
  check_labels(world.pool, world.pool_true_labels, world.spec.n_classes);
  for (std::uint32_t k = 0; k < world.spec.n_tasks; ++k)
    check_labels(world.val_features[k], world.val_labels[k],
                 world.spec.n_classes);
  return world;
}

void save_params(const ModelParams& params,
                 const std::filesystem::path& destination) {
  check_finite(params, "when saving parameters");
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["n_classes"] = params.n_classes;
  doc["feature_dim"] = params.feature_dim;
  doc["weights"] = params.weights;
  doc["bias"] = params.bias;

  std::ofstream out(destination, std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + destination.string());
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + destination.string());
}

ModelParams load_params(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw IoError("cannot open: " + source.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(FormatIssue::bad_header,
                      "parameter file is not valid JSON: " + source.string() +
                          ": " + e.what());
  }

  ModelParams params;
  try {
    if (doc.at("version").get<int>() != 1)
      throw ValidationError("parameter file: unsupported version");
    params.n_classes = doc.at("n_classes").get<std::uint32_t>();
    params.feature_dim = doc.at("feature_dim").get<std::uint32_t>();
    params.weights = doc.at("weights").get<std::vector<double>>();
    params.bias = doc.at("bias").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("parameter file is malformed: " + source.string() +
                          ": " + e.what());
  }
  check_params_match(params, params.feature_dim);
  check_finite(params, "when loading parameters");
  return params;
}

}  // namespace icons
