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

// ScoreTable: the n x k matrix of per-task mean influence scores that the
// specialist stage hands to the generalist stage.  Row i column k holds the
// mean influence of training example i on task k's validation set.
//
// On disk a table is a float64 shard container (dim = k tasks, count = n
// examples) plus a `<path>.json` sidecar naming the task columns, so the
// scores themselves round-trip bit-exactly.

#ifndef ICONS_SCORE_TABLE_HPP_
#define ICONS_SCORE_TABLE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icons/error.hpp"

namespace icons {

struct ScoreTable {
  std::uint64_t n = 0;  // training examples (rows)
  std::uint32_t k = 0;  // tasks (columns)
  std::vector<std::string> task_names;  // size k, unique
  std::vector<double> scores;           // row-major, size n*k

  double at(std::uint64_t row, std::uint32_t col) const {
    return scores[row * k + col];
  }
  double& at(std::uint64_t row, std::uint32_t col) {
    return scores[row * k + col];
  }

  // Copies column `col` into a contiguous vector (aggregators work per
  // column).
  std::vector<double> column(std::uint32_t col) const;
};

// Shape/name consistency checks; throws ValidationError.
void validate_score_table(const ScoreTable& table);

// Writes `destination` (float64 container) and `destination + ".json"`
// (sidecar: {"version": 1, "n": ..., "k": ..., "tasks": [...]}).
void save_score_table(const ScoreTable& table,
                      const std::filesystem::path& destination);

// Reads both files back and cross-checks the sidecar against the container.
ScoreTable load_score_table(const std::filesystem::path& source);

}  // namespace icons

#endif  // ICONS_SCORE_TABLE_HPP_
