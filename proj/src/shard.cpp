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

#include "icons/shard.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace icons {

namespace {

void put_u32(unsigned char* out, std::uint32_t v) {
  out[0] = static_cast<unsigned char>(v);
  out[1] = static_cast<unsigned char>(v >> 8);
  out[2] = static_cast<unsigned char>(v >> 16);
  out[3] = static_cast<unsigned char>(v >> 24);
}

void put_u64(unsigned char* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint32_t get_u32(const unsigned char* in) {
  return static_cast<std::uint32_t>(in[0]) |
         static_cast<std::uint32_t>(in[1]) << 8 |
         static_cast<std::uint32_t>(in[2]) << 16 |
         static_cast<std::uint32_t>(in[3]) << 24;
}

std::uint64_t get_u64(const unsigned char* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

template <typename Scalar>
constexpr std::uint32_t dtype_code();
template <>
constexpr std::uint32_t dtype_code<float>() {
  return kDtypeF32;
}
template <>
constexpr std::uint32_t dtype_code<double>() {
  return kDtypeF64;
}

template <typename Scalar>
void encode_values(const Scalar* values, std::size_t n, unsigned char* out) {
  using Bits = std::conditional_t<sizeof(Scalar) == 4, std::uint32_t,
                                  std::uint64_t>;
  for (std::size_t i = 0; i < n; ++i) {
    Bits bits = std::bit_cast<Bits>(values[i]);
    for (std::size_t b = 0; b < sizeof(Scalar); ++b)
      out[i * sizeof(Scalar) + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
}

template <typename Scalar>
void decode_values(const unsigned char* in, std::size_t n, Scalar* values) {
  using Bits = std::conditional_t<sizeof(Scalar) == 4, std::uint32_t,
                                  std::uint64_t>;
  for (std::size_t i = 0; i < n; ++i) {
    Bits bits = 0;
    for (std::size_t b = 0; b < sizeof(Scalar); ++b)
      bits |= static_cast<Bits>(in[i * sizeof(Scalar) + b]) << (8 * b);
    values[i] = std::bit_cast<Scalar>(bits);
  }
}

struct Header {
  std::uint32_t dtype = 0;
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
};

void encode_header(const Header& h, unsigned char* out) {
  std::memcpy(out, kShardMagic, 8);
  put_u32(out + 8, kShardVersion);
  put_u32(out + 12, h.dtype);
  put_u32(out + 16, h.dim);
  put_u32(out + 20, 0);  // reserved
  put_u64(out + 24, h.count);
}

Header decode_header(const unsigned char* in, std::uint32_t expected_dtype,
                     const std::filesystem::path& source) {
  if (std::memcmp(in, kShardMagic, 8) != 0)
    throw FormatError(FormatIssue::bad_magic,
                      "not a feature shard file: " + source.string());
  std::uint32_t version = get_u32(in + 8);
  if (version != kShardVersion)
    throw FormatError(FormatIssue::bad_version,
                      "unsupported shard version " + std::to_string(version) +
                          " in " + source.string());
  Header h;
  h.dtype = get_u32(in + 12);
  if (h.dtype != expected_dtype)
    throw FormatError(FormatIssue::bad_dtype,
                      "unexpected dtype " + std::to_string(h.dtype) + " in " +
                          source.string());
  h.dim = get_u32(in + 16);
  if (h.dim == 0)
    throw FormatError(FormatIssue::bad_header,
                      "shard dim must be >= 1: " + source.string());
  if (get_u32(in + 20) != 0)
    throw FormatError(FormatIssue::bad_header,
                      "reserved header field is nonzero: " + source.string());
  h.count = get_u64(in + 24);
  return h;
}

template <typename Scalar>
void write_container(std::uint32_t dim, std::uint64_t count,
                     const std::vector<Scalar>& values,
                     const std::filesystem::path& destination) {
  if (dim == 0) throw ValidationError("shard dim must be >= 1");
  if (values.size() != static_cast<std::size_t>(count) * dim)
    throw ValidationError("shard value count does not equal count*dim");
  for (Scalar v : values)
    if (!std::isfinite(static_cast<double>(v)))
      throw ValidationError("refusing to write non-finite value to " +
                            destination.string());

  std::vector<unsigned char> payload(values.size() * sizeof(Scalar));
  encode_values(values.data(), values.size(), payload.data());
  std::uint64_t checksum = fnv1a64(payload.data(), payload.size());

  unsigned char header[kShardHeaderBytes];
  encode_header(Header{dtype_code<Scalar>(), dim, count}, header);
  unsigned char trailer[8];
  put_u64(trailer, checksum);

  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + destination.string());
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  out.write(reinterpret_cast<const char*>(trailer), sizeof(trailer));
  out.flush();
  if (!out) throw IoError("write failed: " + destination.string());
}

template <typename Scalar>
void read_container(const std::filesystem::path& source, std::uint32_t* dim,
                    std::uint64_t* count, std::vector<Scalar>* values) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError("cannot open: " + source.string());

  unsigned char header[kShardHeaderBytes];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(header)))
    throw FormatError(FormatIssue::truncated,
                      "file too small for shard header: " + source.string());
  Header h = decode_header(header, dtype_code<Scalar>(), source);

  std::uint64_t n_values = h.count * h.dim;
  std::size_t payload_bytes = n_values * sizeof(Scalar);
  std::error_code ec;
  std::uintmax_t file_size = std::filesystem::file_size(source, ec);
  if (ec) throw IoError("cannot stat: " + source.string());
  if (file_size != kShardHeaderBytes + payload_bytes + 8)
    throw FormatError(
        FormatIssue::truncated,
        "payload size mismatch (expected " +
            std::to_string(kShardHeaderBytes + payload_bytes + 8) +
            " bytes, file has " + std::to_string(file_size) + "): " +
            source.string());

  std::vector<unsigned char> payload(payload_bytes);
  if (payload_bytes > 0) {
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload_bytes));
    if (in.gcount() != static_cast<std::streamsize>(payload_bytes))
      throw FormatError(FormatIssue::truncated,
                        "truncated payload: " + source.string());
  }
  unsigned char trailer[8];
  in.read(reinterpret_cast<char*>(trailer), sizeof(trailer));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(trailer)))
    throw FormatError(FormatIssue::truncated,
                      "missing checksum trailer: " + source.string());

  std::uint64_t stored = get_u64(trailer);
  std::uint64_t actual = fnv1a64(payload.data(), payload.size());
  if (stored != actual)
    throw FormatError(FormatIssue::checksum_mismatch,
                      "payload checksum mismatch: " + source.string());

  values->resize(n_values);
  decode_values(payload.data(), n_values, values->data());
  for (Scalar v : *values)
    if (!std::isfinite(static_cast<double>(v)))
      throw FormatError(FormatIssue::non_finite,
                        "non-finite value in shard: " + source.string());
  *dim = h.dim;
  *count = h.count;
}

}  // namespace

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size,
                      std::uint64_t state) {
  for (std::size_t i = 0; i < size; ++i) {
    state ^= static_cast<std::uint64_t>(data[i]);
    state *= kFnv64Prime;
  }
  return state;
}

void write_shard(const FeatureShard& shard,
                 const std::filesystem::path& destination) {
  write_container<float>(shard.dim, shard.count, shard.values, destination);
}

FeatureShard read_shard(const std::filesystem::path& source) {
  FeatureShard shard;
  read_container<float>(source, &shard.dim, &shard.count, &shard.values);
  return shard;
}

void write_f64_block(const F64Block& block,
                     const std::filesystem::path& destination) {
  write_container<double>(block.dim, block.count, block.values, destination);
}

F64Block read_f64_block(const std::filesystem::path& source) {
  F64Block block;
  read_container<double>(source, &block.dim, &block.count, &block.values);
  return block;
}

ShardBlockReader::ShardBlockReader(const std::filesystem::path& source,
                                   std::uint64_t block_rows)
    : in_(source, std::ios::binary), source_(source), block_rows_(block_rows) {
  if (block_rows_ == 0) throw ValidationError("block_rows must be >= 1");
  if (!in_) throw IoError("cannot open: " + source.string());

  unsigned char header[kShardHeaderBytes];
  in_.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in_.gcount() != static_cast<std::streamsize>(sizeof(header)))
    throw FormatError(FormatIssue::truncated,
                      "file too small for shard header: " + source.string());
  Header h = decode_header(header, kDtypeF32, source);
  dim_ = h.dim;
  count_ = h.count;

  std::size_t payload_bytes = h.count * h.dim * sizeof(float);
  std::error_code ec;
  std::uintmax_t file_size = std::filesystem::file_size(source, ec);
  if (ec) throw IoError("cannot stat: " + source.string());
  if (file_size != kShardHeaderBytes + payload_bytes + 8)
    throw FormatError(FormatIssue::truncated,
                      "payload size mismatch: " + source.string());
}

bool ShardBlockReader::next(FeatureShard& block) {
  if (cursor_ >= count_) {
    if (!verified_) {
      // Empty shard: still check the trailer against the empty payload.
      unsigned char trailer[8];
      in_.read(reinterpret_cast<char*>(trailer), sizeof(trailer));
      if (in_.gcount() != static_cast<std::streamsize>(sizeof(trailer)))
        throw FormatError(FormatIssue::truncated,
                          "missing checksum trailer: " + source_.string());
      if (get_u64(trailer) != checksum_state_)
        throw FormatError(FormatIssue::checksum_mismatch,
                          "payload checksum mismatch: " + source_.string());
      verified_ = true;
    }
    return false;
  }

  std::uint64_t rows = std::min<std::uint64_t>(block_rows_, count_ - cursor_);
  std::size_t bytes = rows * dim_ * sizeof(float);
  std::vector<unsigned char> raw(bytes);
  in_.read(reinterpret_cast<char*>(raw.data()),
           static_cast<std::streamsize>(bytes));
  if (in_.gcount() != static_cast<std::streamsize>(bytes))
    throw FormatError(FormatIssue::truncated,
                      "truncated payload: " + source_.string());
  checksum_state_ = fnv1a64(raw.data(), raw.size(), checksum_state_);

  block.dim = dim_;
  block.count = rows;
  block.base_id = cursor_;
  block.values.resize(rows * dim_);
  decode_values(raw.data(), block.values.size(), block.values.data());
  for (float v : block.values)
    if (!std::isfinite(v))
      throw FormatError(FormatIssue::non_finite,
                        "non-finite value in shard: " + source_.string());
  cursor_ += rows;

  if (cursor_ >= count_) {
    unsigned char trailer[8];
    in_.read(reinterpret_cast<char*>(trailer), sizeof(trailer));
    if (in_.gcount() != static_cast<std::streamsize>(sizeof(trailer)))
      throw FormatError(FormatIssue::truncated,
                        "missing checksum trailer: " + source_.string());
    if (get_u64(trailer) != checksum_state_)
      throw FormatError(FormatIssue::checksum_mismatch,
                        "payload checksum mismatch: " + source_.string());
    verified_ = true;
  }
  return true;
}

std::vector<FeatureShard> stream_blocks(const std::filesystem::path& source,
                                        std::uint64_t block_rows) {
  ShardBlockReader reader(source, block_rows);
  std::vector<FeatureShard> blocks;
  FeatureShard block;
  while (reader.next(block)) blocks.push_back(block);
  return blocks;
}

}  // namespace icons
