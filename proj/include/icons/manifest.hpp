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

// Dataset manifest: a small JSON document that ties together the training
// feature shards and the per-task validation shards, and records the
// projection settings used to produce them.  The manifest is the unit of
// exchange between pipeline stages — every downstream command takes one.
//
// Schema (version 1):
//   {
//     "version": 1,
//     "feature_dim": 1024,
//     "normalized": true,
//     "projection": {"seed": 7, "in_dim": 4096, "out_dim": 1024,
//                    "family": "signed"},
//     "train_shards": [{"path": "train_0.shard", "count": 1000,
//                       "base_id": 0}, ...],
//     "tasks": [{"name": "taskA", "val_shard": "val_taskA.shard",
//                "count": 50}, ...]
//   }
//
// Shard paths are stored relative to the manifest file; `root` (the manifest's
// directory) is filled in at load time and never serialized.

#ifndef ICONS_MANIFEST_HPP_
#define ICONS_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icons/error.hpp"

namespace icons {

// Settings of the random projection applied to raw gradients.  `family` is
// "signed" for the +-1/sqrt(out_dim) construction; other families may be
// added behind new names.  seed == 0 with in_dim == out_dim == 0 means the
// features were never projected (e.g. synthetic data stored raw).
struct ProjectionSettings {
  std::uint64_t seed = 0;
  std::uint32_t in_dim = 0;
  std::uint32_t out_dim = 0;
  std::string family = "signed";
};

struct TrainShardEntry {
  std::string path;        // relative to the manifest directory
  std::uint64_t count = 0; // rows in the shard
  std::uint64_t base_id = 0;  // global id of the shard's first row
};

struct TaskEntry {
  std::string name;
  std::string val_shard;   // relative to the manifest directory
  std::uint64_t count = 0; // validation examples for this task
};

struct Manifest {
  std::uint32_t version = 1;
  std::uint32_t feature_dim = 0;
  bool normalized = false;
  ProjectionSettings projection;
  std::vector<TrainShardEntry> train_shards;
  std::vector<TaskEntry> tasks;

  // Directory the manifest was loaded from; not serialized.
  std::filesystem::path root;

  std::uint64_t total_train_count() const;
  std::filesystem::path train_shard_path(std::size_t index) const;
  std::filesystem::path task_shard_path(std::size_t index) const;
};

// Structural checks: version == 1, feature_dim >= 1, at least one task,
// unique task names, base_ids contiguous from 0 in listing order, and
// positive per-task counts.  Throws ValidationError on the first violation.
void validate_manifest(const Manifest& manifest);

// Serializes with stable key order; validates before writing.  Paths inside
// the manifest stay as written — callers are responsible for making them
// relative to `destination`'s directory.
void save_manifest(const Manifest& manifest,
                   const std::filesystem::path& destination);

// Parses, fills `root` from the file's directory, and validates.  Unknown
// keys are rejected so that typos fail loudly instead of being ignored.
Manifest load_manifest(const std::filesystem::path& source);

}  // namespace icons

#endif  // ICONS_MANIFEST_HPP_
