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

// Types shared by the aggregation strategies and the final selection stage.
// They live apart from both so that rank-driven strategies (round robin,
// min-rank) can return a SelectionResult without a circular include.

#ifndef ICONS_SELECTION_RESULT_HPP_
#define ICONS_SELECTION_RESULT_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace icons {

enum class Strategy {
  vote,            // cross-task vote consensus
  merge,           // row sum of per-task scores
  max,             // row maximum
  merge_sumnorm,   // row sum after dividing each column by its sum
  merge_gausnorm,  // row sum after per-column z-scoring
  round_robin,     // cyclic per-task best-rank picks
  minrank,         // smallest best-rank across tasks
};

// CLI-visible names: vote, merge, max, merge-sumnorm, merge-gausnorm,
// roundrobin, minrank.
const char* strategy_name(Strategy strategy);
Strategy parse_strategy(const std::string& name);

// One picked example with its provenance.  The meaning of the two keys
// depends on the strategy:
//   vote         key = vote count,        tie_break = consensus strength c_i
//   merge family key = aggregate score,   tie_break = 0 (id orders ties)
//   minrank      key = best rank b_i,     tie_break = second-smallest rank
//   round robin  key = picking task,      tie_break = rank within that task
struct SelectedExample {
  std::uint64_t id = 0;
  double key = 0.0;
  double tie_break = 0.0;
};

struct SelectionResult {
  Strategy strategy = Strategy::vote;
  double ratio = 0.0;   // requested selection ratio p
  std::uint64_t m = 0;  // ceil(p * N), always == selected.size()
  std::vector<SelectedExample> selected;  // in selection order

  // Vote-strategy extras; empty / -1 for the other strategies.
  std::vector<double> thresholds;           // per-task cutoffs at this p
  std::vector<std::uint64_t> vote_histogram;  // index v = #examples with v votes
  std::int64_t boundary_level = -1;  // vote level split by the tie-break

  std::uint64_t seed = 0;  // propagated pipeline seed, for report provenance
  std::vector<std::string> warnings;
};

}  // namespace icons

#endif  // ICONS_SELECTION_RESULT_HPP_
