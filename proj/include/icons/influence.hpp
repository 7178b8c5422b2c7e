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

// Influence computation: dot products between training-gradient rows and
// validation-gradient rows.  Inputs are expected to be unit-normalized
// (normalize_rows), which makes every entry a cosine; the kernel itself is a
// plain dot product so normalization is paid once, not per pair.
//
// Reproducibility contract: every dot product accumulates over feature
// coordinates in ascending order into a double; per-row task means sum over
// validation columns in ascending order and divide once.  Parallelism is
// only across training rows, so results are bit-identical for any worker
// count and any streaming block size.

#ifndef ICONS_INFLUENCE_HPP_
#define ICONS_INFLUENCE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icons/manifest.hpp"
#include "icons/score_table.hpp"
#include "icons/shard.hpp"

namespace icons {

// Train x validation influence entries for one task, row-major float64.
struct InfluenceMatrix {
  std::uint64_t n_train = 0;
  std::uint64_t n_val = 0;
  std::string task_name;
  std::vector<double> entries;  // size n_train * n_val

  double at(std::uint64_t train_row, std::uint64_t val_row) const {
    return entries[train_row * n_val + val_row];
  }
};

// Mean influence of each training example on one task's validation set.
struct TaskScores {
  std::string task_name;
  std::vector<double> scores;  // length = train count
};

// The kernel only sees raw floats, so callers must say whether the rows were
// normalized.  Raw (unnormalized) inner products are refused unless the
// caller opts in — entries would no longer be cosines and the thresholds
// downstream would silently change meaning.
struct InfluenceOptions {
  bool inputs_normalized = true;
  bool allow_raw = false;
};

// Double-accumulated dot product over `dim` floats, ascending order.
double dot_f32(const float* a, const float* b, std::uint32_t dim);

// Full matrix for one task, all rows in memory.
InfluenceMatrix influence_matrix(const FeatureShard& train,
                                 const FeatureShard& val,
                                 const InfluenceOptions& options = {},
                                 std::string task_name = "");

// Same result, reading the training shard in blocks of `block_rows`.
// Bit-identical to the in-memory version for every block size.
InfluenceMatrix influence_matrix_streamed(
    const std::filesystem::path& train_path, const FeatureShard& val,
    std::uint64_t block_rows, const InfluenceOptions& options = {},
    std::string task_name = "");

// scores[i] = mean over validation columns of row i.
TaskScores task_mean_scores(const InfluenceMatrix& matrix);

// Row-wise difference clean - noise (plain float subtraction), used to
// isolate the input-dependent part of a gradient: downstream callers
// normalize the delta and feed it through influence_matrix.  Shards must be
// aligned (same count, dim, base_id).
FeatureShard vds_delta_features(const FeatureShard& clean_grads,
                                const FeatureShard& noise_grads);

// Streams every training shard in the manifest once and reduces directly to
// the N x K table of per-task means (column order = manifest task order)
// without materializing any full influence matrix.
ScoreTable build_all_task_scores(const Manifest& manifest,
                                 std::uint64_t block_rows = 256,
                                 bool allow_raw = false);

}  // namespace icons

#endif  // ICONS_INFLUENCE_HPP_
