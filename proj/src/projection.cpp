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

#include "icons/projection.hpp"

#include <cmath>
#include <vector>

#include "icons/parallel.hpp"
#include "icons/rng.hpp"

namespace icons {

namespace {

// Rows processed together so each (output, input) sign hash is computed once
// per strip instead of once per row.  Any value gives identical results; this
// one keeps the double accumulators inside L1.
constexpr std::uint64_t kStripRows = 32;

inline double sign_entry(std::uint64_t seed, std::uint64_t out_row,
                         std::uint64_t in_dim, std::uint64_t in_col) {
  std::uint64_t h = splitmix64_hash(seed ^ (out_row * in_dim + in_col));
  return (h & 1u) ? 1.0 : -1.0;
}

}  // namespace

void validate_projection_settings(const ProjectionSettings& settings) {
  if (settings.family != kSignedFamily)
    throw ValidationError("unknown projection family \"" + settings.family +
                          "\"");
  if (settings.in_dim == 0 || settings.out_dim == 0)
    throw ValidationError("projection dims must be >= 1");
}

double projection_entry(const ProjectionSettings& settings,
                        std::uint32_t out_row, std::uint32_t in_col) {
  validate_projection_settings(settings);
  if (out_row >= settings.out_dim || in_col >= settings.in_dim)
    throw ValidationError("projection entry index out of range");
  return sign_entry(settings.seed, out_row, settings.in_dim, in_col) /
         std::sqrt(static_cast<double>(settings.out_dim));
}

FeatureShard project_block(const ProjectionSettings& settings,
                           const FeatureShard& input) {
  validate_projection_settings(settings);
  if (input.dim != settings.in_dim)
    throw ValidationError("input dim " + std::to_string(input.dim) +
                          " does not match projection in_dim " +
                          std::to_string(settings.in_dim));

  const std::uint64_t in_dim = settings.in_dim;
  const std::uint64_t out_dim = settings.out_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(out_dim));

  FeatureShard output;
  output.dim = settings.out_dim;
  output.count = input.count;
  output.base_id = input.base_id;
  output.values.resize(input.count * out_dim);

  parallel_for_rows(input.count, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<double> acc;
    for (std::uint64_t strip = begin; strip < end; strip += kStripRows) {
      const std::uint64_t rows = std::min(kStripRows, end - strip);
      acc.assign(rows * out_dim, 0.0);
      for (std::uint64_t i = 0; i < out_dim; ++i) {
        double* strip_acc = acc.data() + i * rows;
        for (std::uint64_t c = 0; c < in_dim; ++c) {
          const double sign = sign_entry(settings.seed, i, in_dim, c);
          const float* col = input.values.data() + strip * in_dim + c;
          for (std::uint64_t r = 0; r < rows; ++r)
            strip_acc[r] += sign * static_cast<double>(col[r * in_dim]);
        }
      }
      for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t i = 0; i < out_dim; ++i)
          output.values[(strip + r) * out_dim + i] =
              static_cast<float>(acc[i * rows + r] * scale);
    }
  });
  return output;
}

NormalizeResult normalize_rows(const FeatureShard& input) {
  NormalizeResult result;
  result.shard = input;
  std::vector<std::uint8_t> zero_flags(input.count, 0);

  parallel_for_rows(input.count, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      const float* row = input.row(r);
      double sumsq = 0.0;
      for (std::uint32_t c = 0; c < input.dim; ++c)
        sumsq += static_cast<double>(row[c]) * static_cast<double>(row[c]);
      if (sumsq == 0.0) {
        zero_flags[r] = 1;
        continue;
      }
      const double norm = std::sqrt(sumsq);
      float* out = result.shard.row(r);
      for (std::uint32_t c = 0; c < input.dim; ++c)
        out[c] = static_cast<float>(static_cast<double>(row[c]) / norm);
    }
  });

  for (std::uint8_t flag : zero_flags) result.zero_rows += flag;
  return result;
}

}  // namespace icons
