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

#include "icons/manifest.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace icons {

namespace {

using nlohmann::ordered_json;

// Rejects keys outside `allowed` so schema typos surface immediately.
void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object())
    throw ValidationError("manifest: " + where + " must be a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      throw ValidationError("manifest: unknown key \"" + item.key() +
                            "\" in " + where);
}

template <typename T>
T require(const ordered_json& obj, const std::string& key,
          const std::string& where) {
  if (!obj.contains(key))
    throw ValidationError("manifest: missing key \"" + key + "\" in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("manifest: key \"" + key + "\" in " + where +
                          " has the wrong type");
  }
}

}  // namespace

std::uint64_t Manifest::total_train_count() const {
  std::uint64_t total = 0;
  for (const TrainShardEntry& entry : train_shards) total += entry.count;
  return total;
}

std::filesystem::path Manifest::train_shard_path(std::size_t index) const {
  return root / train_shards.at(index).path;
}

std::filesystem::path Manifest::task_shard_path(std::size_t index) const {
  return root / tasks.at(index).val_shard;
}

void validate_manifest(const Manifest& manifest) {
  if (manifest.version != 1)
    throw ValidationError("manifest: unsupported version " +
                          std::to_string(manifest.version));
  if (manifest.feature_dim == 0)
    throw ValidationError("manifest: feature_dim must be >= 1");
  if (manifest.tasks.empty())
    throw ValidationError("manifest: at least one task is required");

  std::uint64_t next_id = 0;
  for (std::size_t s = 0; s < manifest.train_shards.size(); ++s) {
    const TrainShardEntry& entry = manifest.train_shards[s];
    if (entry.path.empty())
      throw ValidationError("manifest: train shard " + std::to_string(s) +
                            " has an empty path");
    if (entry.base_id != next_id)
      throw ValidationError(
          "manifest: train shard " + std::to_string(s) + " base_id " +
          std::to_string(entry.base_id) + " breaks contiguity (expected " +
          std::to_string(next_id) + ")");
    next_id += entry.count;
  }

  std::set<std::string> names;
  for (std::size_t t = 0; t < manifest.tasks.size(); ++t) {
    const TaskEntry& task = manifest.tasks[t];
    if (task.name.empty())
      throw ValidationError("manifest: task " + std::to_string(t) +
                            " has an empty name");
    if (!names.insert(task.name).second)
      throw ValidationError("manifest: duplicate task name \"" + task.name +
                            "\"");
    if (task.val_shard.empty())
      throw ValidationError("manifest: task \"" + task.name +
                            "\" has an empty val_shard path");
    if (task.count == 0)
      throw ValidationError("manifest: task \"" + task.name +
                            "\" has zero validation examples");
  }
}

void save_manifest(const Manifest& manifest,
                   const std::filesystem::path& destination) {
  validate_manifest(manifest);

  ordered_json doc;
  doc["version"] = manifest.version;
  doc["feature_dim"] = manifest.feature_dim;
  doc["normalized"] = manifest.normalized;
  doc["projection"] = {{"seed", manifest.projection.seed},
                       {"in_dim", manifest.projection.in_dim},
                       {"out_dim", manifest.projection.out_dim},
                       {"family", manifest.projection.family}};
  doc["train_shards"] = ordered_json::array();
  for (const TrainShardEntry& entry : manifest.train_shards)
    doc["train_shards"].push_back({{"path", entry.path},
                                   {"count", entry.count},
                                   {"base_id", entry.base_id}});
  doc["tasks"] = ordered_json::array();
  for (const TaskEntry& task : manifest.tasks)
    doc["tasks"].push_back({{"name", task.name},
                            {"val_shard", task.val_shard},
                            {"count", task.count}});

  std::ofstream out(destination, std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + destination.string());
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + destination.string());
}

Manifest load_manifest(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw IoError("cannot open: " + source.string());

  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(FormatIssue::bad_header,
                      "manifest is not valid JSON: " + source.string() + ": " +
                          e.what());
  }

  check_keys(doc,
             {"version", "feature_dim", "normalized", "projection",
              "train_shards", "tasks"},
             "manifest root");

  Manifest manifest;
  manifest.version = require<std::uint32_t>(doc, "version", "manifest root");
  manifest.feature_dim =
      require<std::uint32_t>(doc, "feature_dim", "manifest root");
  manifest.normalized = require<bool>(doc, "normalized", "manifest root");

  const ordered_json& proj =
      doc.contains("projection")
          ? doc.at("projection")
          : throw ValidationError("manifest: missing key \"projection\"");
  check_keys(proj, {"seed", "in_dim", "out_dim", "family"}, "projection");
  manifest.projection.seed = require<std::uint64_t>(proj, "seed", "projection");
  manifest.projection.in_dim =
      require<std::uint32_t>(proj, "in_dim", "projection");
  manifest.projection.out_dim =
      require<std::uint32_t>(proj, "out_dim", "projection");
  manifest.projection.family =
      require<std::string>(proj, "family", "projection");

  if (!doc.contains("train_shards") || !doc.at("train_shards").is_array())
    throw ValidationError("manifest: \"train_shards\" must be an array");
  for (const ordered_json& entry : doc.at("train_shards")) {
    check_keys(entry, {"path", "count", "base_id"}, "train_shards entry");
    TrainShardEntry shard;
    shard.path = require<std::string>(entry, "path", "train_shards entry");
    shard.count = require<std::uint64_t>(entry, "count", "train_shards entry");
    shard.base_id =
        require<std::uint64_t>(entry, "base_id", "train_shards entry");
    manifest.train_shards.push_back(std::move(shard));
  }

  if (!doc.contains("tasks") || !doc.at("tasks").is_array())
    throw ValidationError("manifest: \"tasks\" must be an array");
  for (const ordered_json& entry : doc.at("tasks")) {
    check_keys(entry, {"name", "val_shard", "count"}, "tasks entry");
    TaskEntry task;
    task.name = require<std::string>(entry, "name", "tasks entry");
    task.val_shard = require<std::string>(entry, "val_shard", "tasks entry");
    task.count = require<std::uint64_t>(entry, "count", "tasks entry");
    manifest.tasks.push_back(std::move(task));
  }

  manifest.root = source.has_parent_path() ? source.parent_path()
                                           : std::filesystem::path(".");
  validate_manifest(manifest);
  return manifest;
}

}  // namespace icons
