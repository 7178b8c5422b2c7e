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

#include "icons/influence.hpp"

#include "icons/parallel.hpp"

namespace icons {

namespace {

void check_options(const InfluenceOptions& options) {
  if (!options.inputs_normalized && !options.allow_raw)
    throw ValidationError(
        "influence inputs are not normalized; normalize them or opt into raw "
        "inner products explicitly");
}

void check_dims(std::uint32_t train_dim, std::uint32_t val_dim) {
  if (train_dim != val_dim)
    throw ValidationError("train dim " + std::to_string(train_dim) +
                          " does not match validation dim " +
                          std::to_string(val_dim));
}

// Writes the block's rows into `out` starting at global row `row_offset`.
void matrix_block(const FeatureShard& train, const FeatureShard& val,
                  std::uint64_t row_offset, std::uint64_t n_val, double* out) {
  parallel_for_rows(train.count, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      double* row_out = out + (row_offset + r) * n_val;
      for (std::uint64_t j = 0; j < n_val; ++j)
        row_out[j] = dot_f32(train.row(r), val.row(j), train.dim);
    }
  });
}

// Mean influence of each block row against each task's validation shard.
// `out` is the row-major N x K score array; rows land at base_id offsets, so
// any block partition produces the same table.
void mean_scores_block(const FeatureShard& train,
                       const std::vector<FeatureShard>& vals,
                       std::uint64_t row_offset, std::uint32_t k,
                       double* out) {
  parallel_for_rows(train.count, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      const float* row = train.row(r);
      double* row_out = out + (row_offset + r) * k;
      for (std::uint32_t t = 0; t < k; ++t) {
        const FeatureShard& val = vals[t];
        double sum = 0.0;
        for (std::uint64_t j = 0; j < val.count; ++j)
          sum += dot_f32(row, val.row(j), train.dim);
        row_out[t] = sum / static_cast<double>(val.count);
      }
    }
  });
}

}  // namespace

double dot_f32(const float* a, const float* b, std::uint32_t dim) {
  double sum = 0.0;
  for (std::uint32_t c = 0; c < dim; ++c)
    sum += static_cast<double>(a[c]) * static_cast<double>(b[c]);
  return sum;
}

InfluenceMatrix influence_matrix(const FeatureShard& train,
                                 const FeatureShard& val,
                                 const InfluenceOptions& options,
                                 std::string task_name) {
  check_options(options);
  check_dims(train.dim, val.dim);
  if (val.count == 0) throw ValidationError("validation set is empty");

  InfluenceMatrix matrix;
  matrix.n_train = train.count;
  matrix.n_val = val.count;
  matrix.task_name = std::move(task_name);
  matrix.entries.resize(train.count * val.count);
  matrix_block(train, val, 0, val.count, matrix.entries.data());
  return matrix;
}

InfluenceMatrix influence_matrix_streamed(
    const std::filesystem::path& train_path, const FeatureShard& val,
    std::uint64_t block_rows, const InfluenceOptions& options,
    std::string task_name) {
  check_options(options);
  if (val.count == 0) throw ValidationError("validation set is empty");

  ShardBlockReader reader(train_path, block_rows);
  check_dims(reader.dim(), val.dim);

  InfluenceMatrix matrix;
  matrix.n_train = reader.count();
  matrix.n_val = val.count;
  matrix.task_name = std::move(task_name);
  matrix.entries.resize(matrix.n_train * matrix.n_val);

  FeatureShard block;
  while (reader.next(block))
    matrix_block(block, val, block.base_id, val.count, matrix.entries.data());
  return matrix;
}

TaskScores task_mean_scores(const InfluenceMatrix& matrix) {
  if (matrix.n_val == 0) throw ValidationError("validation set is empty");

  TaskScores result;
  result.task_name = matrix.task_name;
  result.scores.resize(matrix.n_train);
  for (std::uint64_t i = 0; i < matrix.n_train; ++i) {
    double sum = 0.0;
    for (std::uint64_t j = 0; j < matrix.n_val; ++j) sum += matrix.at(i, j);
    result.scores[i] = sum / static_cast<double>(matrix.n_val);
  }
  return result;
}

FeatureShard vds_delta_features(const FeatureShard& clean_grads,
                                const FeatureShard& noise_grads) {
  if (clean_grads.dim != noise_grads.dim ||
      clean_grads.count != noise_grads.count ||
      clean_grads.base_id != noise_grads.base_id)
    throw ValidationError(
        "clean and noise gradient shards are not aligned (count, dim, and "
        "base_id must all match)");

  FeatureShard delta = clean_grads;
  for (std::size_t i = 0; i < delta.values.size(); ++i)
    delta.values[i] = clean_grads.values[i] - noise_grads.values[i];
  return delta;
}

ScoreTable build_all_task_scores(const Manifest& manifest,
                                 std::uint64_t block_rows, bool allow_raw) {
  validate_manifest(manifest);
  InfluenceOptions options;
  options.inputs_normalized = manifest.normalized;
  options.allow_raw = allow_raw;
  check_options(options);

  std::vector<FeatureShard> vals;
  for (std::size_t t = 0; t < manifest.tasks.size(); ++t) {
    FeatureShard val = read_shard(manifest.task_shard_path(t));
    if (val.count != manifest.tasks[t].count)
      throw ValidationError("task \"" + manifest.tasks[t].name +
                            "\" val shard row count disagrees with manifest");
    check_dims(manifest.feature_dim, val.dim);
    vals.push_back(std::move(val));
  }

  ScoreTable table;
  table.n = manifest.total_train_count();
  table.k = static_cast<std::uint32_t>(manifest.tasks.size());
  for (const TaskEntry& task : manifest.tasks)
    table.task_names.push_back(task.name);
  table.scores.resize(table.n * table.k);

  for (std::size_t s = 0; s < manifest.train_shards.size(); ++s) {
    const TrainShardEntry& entry = manifest.train_shards[s];
    ShardBlockReader reader(manifest.train_shard_path(s), block_rows);
    if (reader.count() != entry.count)
      throw ValidationError("train shard \"" + entry.path +
                            "\" row count disagrees with manifest");
    check_dims(manifest.feature_dim, reader.dim());

    FeatureShard block;
    while (reader.next(block))
      mean_scores_block(block, vals, entry.base_id + block.base_id, table.k,
                        table.scores.data());
  }
  return table;
}

}  // namespace icons
