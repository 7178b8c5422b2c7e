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

#include "icons/score_table.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

#include "icons/shard.hpp"

namespace icons {

std::vector<double> ScoreTable::column(std::uint32_t col) const {
  std::vector<double> out(n);
  for (std::uint64_t row = 0; row < n; ++row) out[row] = at(row, col);
  return out;
}

void validate_score_table(const ScoreTable& table) {
  if (table.k == 0)
    throw ValidationError("score table: at least one task column is required");
  if (table.task_names.size() != table.k)
    throw ValidationError("score table: task_names size does not match k");
  if (table.scores.size() != table.n * table.k)
    throw ValidationError("score table: scores size does not equal n*k");
  std::set<std::string> names;
  for (const std::string& name : table.task_names) {
    if (name.empty())
      throw ValidationError("score table: empty task name");
    if (!names.insert(name).second)
      throw ValidationError("score table: duplicate task name \"" + name +
                            "\"");
  }
}

void save_score_table(const ScoreTable& table,
                      const std::filesystem::path& destination) {
  validate_score_table(table);

  F64Block block;
  block.dim = table.k;
  block.count = table.n;
  block.values = table.scores;
  write_f64_block(block, destination);

  nlohmann::ordered_json sidecar;
  sidecar["version"] = 1;
  sidecar["n"] = table.n;
  sidecar["k"] = table.k;
  sidecar["tasks"] = table.task_names;

  std::filesystem::path sidecar_path = destination;
  sidecar_path += ".json";
  std::ofstream out(sidecar_path, std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + sidecar_path.string());
  out << sidecar.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + sidecar_path.string());
}

ScoreTable load_score_table(const std::filesystem::path& source) {
  F64Block block = read_f64_block(source);

  std::filesystem::path sidecar_path = source;
  sidecar_path += ".json";
  std::ifstream in(sidecar_path);
  if (!in) throw IoError("cannot open: " + sidecar_path.string());
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(FormatIssue::bad_header,
                      "score table sidecar is not valid JSON: " +
                          sidecar_path.string() + ": " + e.what());
  }

  ScoreTable table;
  table.n = block.count;
  table.k = block.dim;
  table.scores = std::move(block.values);
  try {
    if (sidecar.at("version").get<int>() != 1)
      throw ValidationError("score table sidecar: unsupported version");
    if (sidecar.at("n").get<std::uint64_t>() != table.n ||
        sidecar.at("k").get<std::uint32_t>() != table.k)
      throw ValidationError(
          "score table sidecar shape disagrees with container: " +
          sidecar_path.string());
    table.task_names =
        sidecar.at("tasks").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("score table sidecar is malformed: " +
                          sidecar_path.string() + ": " + e.what());
  }

  validate_score_table(table);
  return table;
}

}  // namespace icons
