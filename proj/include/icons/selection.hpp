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

// Final subset selection over a ScoreTable, plus the analysis suite: vote
// distribution statistics, specialist/generalist overlaps, and the relative
// performance metric.  Everything here is single-threaded and deterministic;
// identical inputs give byte-identical results on any platform.
//
// Vote selection in detail: every example with more votes than the boundary
// level v* is taken, where v* is the smallest vote level whose cumulative
// count from the top reaches M = ceil(p*N).  The remainder is filled from
// level v* by descending consensus strength
//
//   c_i = sum over tasks k of (1 - (rank_k(i) - 1) / N),
//
// i.e. the sum of the example's per-task rank percentiles, with ascending id
// as the final tie-break.  c_i rewards broad moderate influence, in the same
// spirit as the vote itself.

#ifndef ICONS_SELECTION_HPP_
#define ICONS_SELECTION_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icons/aggregation.hpp"
#include "icons/score_table.hpp"
#include "icons/selection_result.hpp"

namespace icons {

// Consensus strengths c_i for every example (used for boundary tie-breaks
// and exposed for tests).
std::vector<double> consensus_strength(const ScoreTable& table);

// Vote-consensus selection at ratio p.  `tally` must come from vote_tally on
// this table with thresholds at this p; the threshold snapshot is recomputed
// internally for the report.
SelectionResult select_by_votes(const VoteTally& tally,
                                const ScoreTable& table, double ratio);

// One entry point for every strategy; picks M = ceil(p*N) examples.  `seed`
// is carried into the result for provenance only — no strategy draws random
// numbers.
SelectionResult select(const ScoreTable& table, Strategy strategy,
                       double ratio, std::uint64_t seed = 0);

// Vote-count distribution at one selection ratio.  `median` is the lower
// median (element (N-1)/2 of the sorted votes).
struct VoteStatsRow {
  double ratio = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by N)
  std::uint32_t median = 0;
  std::uint32_t max_vote = 0;
  double zero_vote_fraction = 0.0;
  std::int64_t threshold = 0;  // boundary vote level v* at this ratio
};

struct VoteStats {
  std::uint32_t k = 0;
  std::vector<VoteStatsRow> rows;  // one per requested ratio, input order
};

VoteStats vote_distribution_stats(const ScoreTable& table,
                                  const std::vector<double>& ratios);

// Overlap fractions between per-task top sets and against a generalist
// selection.  S_k is the top-ceil(p*N) of column k under the total order
// (score descending, id ascending).
struct OverlapReport {
  double ratio = 0.0;
  std::vector<std::string> task_names;
  std::vector<double> pairwise;    // row-major K x K, |S_a ∩ S_b| / |S_a|
  std::vector<double> generalist;  // per task, |S_k ∩ S_gen| / |S_gen|

  double pair(std::uint32_t a, std::uint32_t b) const {
    return pairwise[a * task_names.size() + b];
  }
};

OverlapReport specialist_overlap(const ScoreTable& table, double ratio,
                                 const SelectionResult& generalist);

// Per-task performance of a subset-trained model relative to the full-data
// model, and the mean of those ratios.
struct EvalReport {
  std::vector<std::string> task_names;  // may be empty
  std::vector<double> subset_scores;
  std::vector<double> full_scores;
  std::vector<double> rel;  // subset / full, per task
  double mean_rel = 0.0;
};

EvalReport rel_metric(const std::vector<double>& subset_scores,
                      const std::vector<double>& full_scores,
                      std::vector<std::string> task_names = {});

// Serialization.  A selection is written as two files: newline-delimited ids
// in selection order, and a JSON report {strategy, p, M, thresholds,
// vote_histogram, boundary_level, seed}.
void save_selection(const SelectionResult& result,
                    const std::filesystem::path& ids_path,
                    const std::filesystem::path& report_path);
std::vector<std::uint64_t> load_selection_ids(
    const std::filesystem::path& ids_path);

void save_vote_stats(const VoteStats& stats,
                     const std::filesystem::path& destination);
void save_overlap_report(const OverlapReport& report,
                         const std::filesystem::path& destination);
void save_eval_report(const EvalReport& report,
                      const std::filesystem::path& destination);

}  // namespace icons

#endif  // ICONS_SELECTION_HPP_
