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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "icons/error.hpp"

namespace icons {

// Feature shard container, fixed bit-exactly (all integers little-endian):
//
//   bytes 0-7   magic ASCII "ICONFEAT"
//   u32         version  (1)
//   u32         dtype    (1 = IEEE-754 binary32, 2 = binary64)
//   u32         dim
//   u32         reserved (0)
//   u64         count
//   payload     count*dim values, row-major
//   u64         FNV-1a checksum of the payload bytes
//
// Shard files are immutable after write; concurrent readers are safe.

inline constexpr char kShardMagic[8] = {'I', 'C', 'O', 'N', 'F', 'E', 'A', 'T'};
inline constexpr std::uint32_t kShardVersion = 1;
inline constexpr std::uint32_t kDtypeF32 = 1;
inline constexpr std::uint32_t kDtypeF64 = 2;
inline constexpr std::size_t kShardHeaderBytes = 32;

/// 64-bit FNV-1a over a byte range, resumable via the seed parameter.
inline constexpr std::uint64_t kFnv64OffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnv64Prime = 1099511628211ULL;
std::uint64_t fnv1a64(const unsigned char* data, std::size_t size,
                      std::uint64_t state = kFnv64OffsetBasis);

/// Dense row-major block of per-example feature vectors (gradients, deltas,
/// or arbitrary representations). Row r holds the features of the example
/// with global id base_id + r; base_id is bookkeeping assigned by the
/// manifest, not stored in the file.
struct FeatureShard {
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  std::uint64_t base_id = 0;
  std::vector<float> values;  // count * dim, row-major

  const float* row(std::uint64_t r) const { return values.data() + r * dim; }
  float* row(std::uint64_t r) { return values.data() + r * dim; }
};

/// Same container with a binary64 payload (dtype 2); used for score tables.
struct F64Block {
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  std::vector<double> values;
};

/// Writes a shard. Refuses non-finite values and shards whose value count
/// does not match count*dim. The destination is replaced atomically enough
/// for single-writer use (plain truncating write).
void write_shard(const FeatureShard& shard,
                 const std::filesystem::path& destination);

/// Reads a full shard, validating the header, payload size, checksum, and
/// finiteness. base_id of the result is 0.
FeatureShard read_shard(const std::filesystem::path& source);

void write_f64_block(const F64Block& block,
                     const std::filesystem::path& destination);
F64Block read_f64_block(const std::filesystem::path& source);

/// Streams a shard file in blocks of at most block_rows rows. Blocks come
/// back with base_ids advancing contiguously from 0; the concatenation of
/// all blocks equals read_shard(source). The payload checksum is folded in
/// incrementally and verified when the last block is produced, so a
/// corrupted file raises on (or before) the final next() call.
class ShardBlockReader {
 public:
  ShardBlockReader(const std::filesystem::path& source,
                   std::uint64_t block_rows);

  /// Fills the next block; returns false once the shard is exhausted.
  bool next(FeatureShard& block);

  std::uint32_t dim() const { return dim_; }
  std::uint64_t count() const { return count_; }

 private:
  std::ifstream in_;
  std::filesystem::path source_;
  std::uint32_t dim_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t cursor_ = 0;
  std::uint64_t block_rows_ = 0;
  std::uint64_t checksum_state_ = kFnv64OffsetBasis;
  bool verified_ = false;
};

/// Convenience eager form of ShardBlockReader.
std::vector<FeatureShard> stream_blocks(const std::filesystem::path& source,
                                        std::uint64_t block_rows);

}  // namespace icons
