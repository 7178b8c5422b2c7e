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

// Signed random projection of high-dimensional gradient features down to a
// working dimension, plus row L2-normalization.  The projection matrix is
// never materialized: entry (i, c) of the out_dim x in_dim matrix is
//
//   R[i][c] = s(i, c) / sqrt(out_dim),
//   s(i, c) = +1 if splitmix64_hash(seed ^ (i * in_dim + c)) has its low bit
//             set, else -1,
//
// so any entry can be regenerated from (seed, in_dim, out_dim) alone.  Such
// sign matrices preserve pairwise cosines in expectation (the usual
// Johnson-Lindenstrauss argument applies to them as well as to Gaussians).
//
// Reproducibility contract: for each output element the kernel accumulates
// the signed sum over input coordinates in ascending order into a double,
// multiplies once by 1/sqrt(out_dim), and rounds to float.  Parallelism is
// only across rows, so results are bit-identical for any worker count and
// any block size.

#ifndef ICONS_PROJECTION_HPP_
#define ICONS_PROJECTION_HPP_

#include <cstdint>

#include "icons/manifest.hpp"
#include "icons/shard.hpp"

namespace icons {

// Name of the sign-matrix construction above, as recorded in manifests.
inline constexpr const char* kSignedFamily = "signed";

// Rejects settings the kernel cannot honor (zero dims, unknown family).
void validate_projection_settings(const ProjectionSettings& settings);

// Scaled matrix entry R[out_row][in_col]; mainly for tests and tooling.
double projection_entry(const ProjectionSettings& settings,
                        std::uint32_t out_row, std::uint32_t in_col);

// Projects every row of `input` (dim must equal settings.in_dim) to
// settings.out_dim columns.  count and base_id carry over.
FeatureShard project_block(const ProjectionSettings& settings,
                           const FeatureShard& input);

struct NormalizeResult {
  FeatureShard shard;
  std::uint64_t zero_rows = 0;  // rows with exactly zero norm, left as-is
};

// Scales each row to unit L2 norm (sum of squares accumulated in double,
// ascending coordinate order).  Zero rows are kept unchanged and counted so
// callers can decide whether that is a problem.
NormalizeResult normalize_rows(const FeatureShard& input);

}  // namespace icons

#endif  // ICONS_PROJECTION_HPP_
