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

#include "icons/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"

namespace icons {

namespace {

std::vector<std::uint64_t> vote_histogram(const VoteTally& tally) {
  std::vector<std::uint64_t> hist(tally.k + 1, 0);
  for (std::uint32_t v : tally.votes) ++hist[v];
  return hist;
}

// Smallest vote level whose cumulative count from the top reaches m.
std::int64_t boundary_level(const std::vector<std::uint64_t>& hist,
                            std::uint64_t m) {
  std::uint64_t cumulative = 0;
  for (std::int64_t level = static_cast<std::int64_t>(hist.size()) - 1;
       level >= 0; --level) {
    cumulative += hist[level];
    if (cumulative >= m) return level;
  }
  return 0;  // unreachable for m <= N
}

void write_text(const std::filesystem::path& destination,
                const std::string& text) {
  std::ofstream out(destination, std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + destination.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + destination.string());
}

}  // namespace

std::vector<double> consensus_strength(const ScoreTable& table) {
  const std::vector<std::vector<std::uint64_t>> ranks = rank_table(table);
  std::vector<double> strength(table.n, 0.0);
  for (std::uint64_t i = 0; i < table.n; ++i)
    for (std::uint32_t t = 0; t < table.k; ++t)
      strength[i] += 1.0 - static_cast<double>(ranks[t][i] - 1) /
                               static_cast<double>(table.n);
  return strength;
}

SelectionResult select_by_votes(const VoteTally& tally,
                                const ScoreTable& table, double ratio) {
  if (tally.votes.size() != table.n || tally.k != table.k)
    throw ValidationError("vote tally shape does not match score table");
  const std::uint64_t m = selection_size(ratio, table.n);

  SelectionResult result;
  result.strategy = Strategy::vote;
  result.ratio = ratio;
  result.m = m;
  result.thresholds = thresholds(table, ratio).cutoffs;
  result.vote_histogram = vote_histogram(tally);
  result.boundary_level = boundary_level(result.vote_histogram, m);

  const std::vector<double> strength = consensus_strength(table);
  std::vector<std::uint64_t> order(table.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (tally.votes[a] != tally.votes[b])
      return tally.votes[a] > tally.votes[b];
    if (strength[a] != strength[b]) return strength[a] > strength[b];
    return a < b;
  });

  for (std::uint64_t pos = 0; pos < m; ++pos) {
    const std::uint64_t id = order[pos];
    result.selected.push_back(
        {id, static_cast<double>(tally.votes[id]), strength[id]});
  }
  return result;
}

SelectionResult select(const ScoreTable& table, Strategy strategy,
                       double ratio, std::uint64_t seed) {
  validate_score_table(table);
  const std::uint64_t m = selection_size(ratio, table.n);

  SelectionResult result;
  switch (strategy) {
    case Strategy::vote: {
      const ThresholdSet cutoffs = thresholds(table, ratio);
      result = select_by_votes(vote_tally(table, cutoffs), table, ratio);
      break;
    }
    case Strategy::merge:
    case Strategy::max:
    case Strategy::merge_sumnorm:
    case Strategy::merge_gausnorm: {
      AggregateRanking ranking;
      if (strategy == Strategy::merge) ranking = merge_scores(table);
      else if (strategy == Strategy::max) ranking = max_scores(table);
      else if (strategy == Strategy::merge_sumnorm)
        ranking = merge_sumnorm(table);
      else ranking = merge_gausnorm(table);
      result.strategy = strategy;
      result.m = m;
      for (std::uint64_t pos = 0; pos < m; ++pos) {
        const std::uint64_t id = ranking.order[pos];
        result.selected.push_back({id, ranking.keys[id], 0.0});
      }
      result.warnings = std::move(ranking.warnings);
      break;
    }
    case Strategy::round_robin:
      result = round_robin_select(table, m);
      break;
    case Strategy::minrank:
      result = minrank_select(table, m);
      break;
  }
  result.ratio = ratio;
  result.seed = seed;
  return result;
}

VoteStats vote_distribution_stats(const ScoreTable& table,
                                  const std::vector<double>& ratios) {
  validate_score_table(table);
  if (table.n == 0) throw ValidationError("score table has no rows");

  VoteStats stats;
  stats.k = table.k;
  for (double ratio : ratios) {
    const std::uint64_t m = selection_size(ratio, table.n);
    const VoteTally tally = vote_tally(table, thresholds(table, ratio));

    VoteStatsRow row;
    row.ratio = ratio;

    double sum = 0.0;
    std::uint64_t zeros = 0;
    for (std::uint32_t v : tally.votes) {
      sum += v;
      if (v == 0) ++zeros;
    }
    row.mean = sum / static_cast<double>(table.n);
    double sumsq = 0.0;
    for (std::uint32_t v : tally.votes) {
      const double d = static_cast<double>(v) - row.mean;
      sumsq += d * d;
    }
    row.stddev = std::sqrt(sumsq / static_cast<double>(table.n));

    std::vector<std::uint32_t> sorted = tally.votes;
    std::sort(sorted.begin(), sorted.end());
    row.median = sorted[(table.n - 1) / 2];
    row.max_vote = sorted.back();
    row.zero_vote_fraction =
        static_cast<double>(zeros) / static_cast<double>(table.n);
    row.threshold = boundary_level(vote_histogram(tally), m);
    stats.rows.push_back(row);
  }
  return stats;
}

OverlapReport specialist_overlap(const ScoreTable& table, double ratio,
                                 const SelectionResult& generalist) {
  validate_score_table(table);
  if (generalist.selected.empty())
    throw ValidationError("generalist selection is empty");
  const std::uint64_t r = selection_size(ratio, table.n);
  const std::uint32_t k = table.k;

  // Top-r id set per task under the (score desc, id asc) total order.
  std::vector<std::set<std::uint64_t>> tops(k);
  {
    std::vector<std::uint64_t> order(table.n);
    for (std::uint32_t t = 0; t < k; ++t) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::uint64_t a, std::uint64_t b) {
                  if (table.at(a, t) != table.at(b, t))
                    return table.at(a, t) > table.at(b, t);
                  return a < b;
                });
      tops[t].insert(order.begin(), order.begin() + r);
    }
  }

  std::set<std::uint64_t> generalist_ids;
  for (const SelectedExample& pick : generalist.selected) {
    if (pick.id >= table.n)
      throw ValidationError("generalist selection id out of range");
    generalist_ids.insert(pick.id);
  }

  OverlapReport report;
  report.ratio = ratio;
  report.task_names = table.task_names;
  report.pairwise.assign(static_cast<std::size_t>(k) * k, 0.0);
  report.generalist.assign(k, 0.0);
  for (std::uint32_t a = 0; a < k; ++a) {
    for (std::uint32_t b = 0; b < k; ++b) {
      std::uint64_t common = 0;
      for (std::uint64_t id : tops[a]) common += tops[b].contains(id);
      report.pairwise[a * k + b] =
          static_cast<double>(common) / static_cast<double>(tops[a].size());
    }
    std::uint64_t common = 0;
    for (std::uint64_t id : tops[a]) common += generalist_ids.contains(id);
    report.generalist[a] =
        static_cast<double>(common) / static_cast<double>(generalist_ids.size());
  }
  return report;
}

EvalReport rel_metric(const std::vector<double>& subset_scores,
                      const std::vector<double>& full_scores,
                      std::vector<std::string> task_names) {
  if (subset_scores.size() != full_scores.size() || subset_scores.empty())
    throw ValidationError(
        "subset and full score lists must be equal-length and non-empty");
  if (!task_names.empty() && task_names.size() != subset_scores.size())
    throw ValidationError("task name list length does not match scores");

  EvalReport report;
  report.task_names = std::move(task_names);
  report.subset_scores = subset_scores;
  report.full_scores = full_scores;
  double sum = 0.0;
  for (std::size_t t = 0; t < subset_scores.size(); ++t) {
    if (!(full_scores[t] > 0.0))
      throw ValidationError(
          "full-data score must be positive to form a relative ratio");
    report.rel.push_back(subset_scores[t] / full_scores[t]);
    sum += report.rel.back();
  }
  report.mean_rel = sum / static_cast<double>(report.rel.size());
  return report;
}

void save_selection(const SelectionResult& result,
                    const std::filesystem::path& ids_path,
                    const std::filesystem::path& report_path) {
  std::string ids;
  for (const SelectedExample& pick : result.selected) {
    ids += std::to_string(pick.id);
    ids += '\n';
  }
  write_text(ids_path, ids);

  nlohmann::ordered_json report;
  report["strategy"] = strategy_name(result.strategy);
  report["p"] = result.ratio;
  report["M"] = result.m;
  report["thresholds"] = result.thresholds;
  report["vote_histogram"] = result.vote_histogram;
  report["boundary_level"] = result.boundary_level;
  report["seed"] = result.seed;
  write_text(report_path, report.dump(2) + "\n");
}

std::vector<std::uint64_t> load_selection_ids(
    const std::filesystem::path& ids_path) {
  std::ifstream in(ids_path);
  if (!in) throw IoError("cannot open: " + ids_path.string());
  std::vector<std::uint64_t> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t used = 0;
    std::uint64_t id = 0;
    try {
      id = std::stoull(line, &used);
    } catch (const std::exception&) {
      throw FormatError(FormatIssue::bad_header,
                        "selection ids file has a non-numeric line: " +
                            ids_path.string());
    }
    if (used != line.size())
      throw FormatError(FormatIssue::bad_header,
                        "selection ids file has a non-numeric line: " +
                            ids_path.string());
    ids.push_back(id);
  }
  return ids;
}

void save_vote_stats(const VoteStats& stats,
                     const std::filesystem::path& destination) {
  nlohmann::ordered_json doc;
  doc["k"] = stats.k;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const VoteStatsRow& row : stats.rows)
    doc["rows"].push_back({{"ratio", row.ratio},
                           {"mean", row.mean},
                           {"stddev", row.stddev},
                           {"median", row.median},
                           {"max_vote", row.max_vote},
                           {"zero_vote_fraction", row.zero_vote_fraction},
                           {"threshold", row.threshold}});
  write_text(destination, doc.dump(2) + "\n");
}

void save_overlap_report(const OverlapReport& report,
                         const std::filesystem::path& destination) {
  const std::size_t k = report.task_names.size();
  nlohmann::ordered_json doc;
  doc["ratio"] = report.ratio;
  doc["tasks"] = report.task_names;
  doc["pairwise"] = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < k; ++a) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t b = 0; b < k; ++b)
      row.push_back(report.pairwise[a * k + b]);
    doc["pairwise"].push_back(row);
  }
  doc["generalist"] = report.generalist;
  write_text(destination, doc.dump(2) + "\n");
}

void save_eval_report(const EvalReport& report,
                      const std::filesystem::path& destination) {
  nlohmann::ordered_json doc;
  doc["tasks"] = report.task_names;
  doc["subset"] = report.subset_scores;
  doc["full"] = report.full_scores;
  doc["rel"] = report.rel;
  doc["mean_rel"] = report.mean_rel;
  write_text(destination, doc.dump(2) + "\n");
}

}  // namespace icons
