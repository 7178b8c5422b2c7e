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

// Cross-task aggregation over a ScoreTable: per-task percentile thresholds
// and vote tallies (the consensus signal), score-merging baselines (sum, max,
// sum-normalized, z-scored), and rank-based schemes (round robin, min-rank).
//
// Conventions, fixed for reproducibility:
//   * Percentile = nearest rank: the cutoff for ratio p over N examples is
//     the r-th largest column value with r = ceil(p*N); qualification uses
//     an inclusive >=, so ties at the cutoff all qualify.
//   * Ranks are a total order per column: descending score, ascending id on
//     ties; rank 1 is best.
//   * Every ordering is made total with a final ascending-id tie-break.
// All operations are pure, single-threaded, deterministic passes.

#ifndef ICONS_AGGREGATION_HPP_
#define ICONS_AGGREGATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "icons/score_table.hpp"
#include "icons/selection_result.hpp"

namespace icons {

// ceil(p * N) with a small relative guard against binary-fraction roundoff
// (0.2 * 2000 must give 400, not 401), clamped to [1, N].
std::uint64_t selection_size(double ratio, std::uint64_t n);

// Per-task cutoffs at ratio p: cutoff k is the r-th largest score in column
// k, r = ceil(p*N).
struct ThresholdSet {
  double ratio = 0.0;
  std::uint64_t rank = 0;  // r
  std::vector<double> cutoffs;  // length K
};

// votes[i] = number of tasks whose cutoff example i meets (inclusive >=).
struct VoteTally {
  std::uint32_t k = 0;
  std::vector<std::uint32_t> votes;  // length N, each in [0, K]
};

// A full preference order produced by a score-merging strategy.
struct AggregateRanking {
  Strategy strategy = Strategy::merge;
  std::vector<double> keys;          // length N, higher preferred
  std::vector<std::uint64_t> order;  // ids, most to least preferred
  std::vector<std::string> warnings;
};

ThresholdSet thresholds(const ScoreTable& table, double ratio);

VoteTally vote_tally(const ScoreTable& table, const ThresholdSet& cutoffs);

// key_i = row sum.
AggregateRanking merge_scores(const ScoreTable& table);

// key_i = row maximum.
AggregateRanking max_scores(const ScoreTable& table);

// key_i = sum over k of score_ik / (column-k sum).  A column whose sum has
// magnitude below 1e-12 cannot be divided meaningfully; it enters
// unnormalized and a warning is recorded.  Negative column sums are applied
// literally (they invert that column's contribution).
AggregateRanking merge_sumnorm(const ScoreTable& table);

// key_i = sum over k of (score_ik - mean_k) / stddev_k with population
// statistics; columns with stddev below 1e-12 contribute 0 for everyone.
AggregateRanking merge_gausnorm(const ScoreTable& table);

// ranks[k][i] = total-order rank of example i in column k (1 = best).
std::vector<std::vector<std::uint64_t>> rank_table(const ScoreTable& table);

// Visits task columns cyclically in table order; each visit picks the task's
// best-ranked example not yet selected, until m picks are made.  Output order
// is pick order.
SelectionResult round_robin_select(const ScoreTable& table, std::uint64_t m);

// Picks the m examples with the smallest best-rank b_i = min_k ranks[k][i];
// ties on b_i broken by second-smallest rank, then ascending id.
SelectionResult minrank_select(const ScoreTable& table, std::uint64_t m);

}  // namespace icons

#endif  // ICONS_AGGREGATION_HPP_
