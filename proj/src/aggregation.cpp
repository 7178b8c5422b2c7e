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

#include "icons/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "icons/error.hpp"

namespace icons {

namespace {

constexpr double kColumnEps = 1e-12;

void check_nonempty(const ScoreTable& table) {
  if (table.n == 0) throw ValidationError("score table has no rows");
  if (table.k == 0) throw ValidationError("score table has no task columns");
}

// Ids sorted by (key descending, id ascending): the canonical total order
// used for every score-merging strategy.
std::vector<std::uint64_t> order_by_key(const std::vector<double>& keys) {
  std::vector<std::uint64_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::uint64_t a, std::uint64_t b) {
              if (keys[a] != keys[b]) return keys[a] > keys[b];
              return a < b;
            });
  return order;
}

AggregateRanking ranking_from_keys(Strategy strategy,
                                   std::vector<double> keys) {
  AggregateRanking ranking;
  ranking.strategy = strategy;
  ranking.order = order_by_key(keys);
  ranking.keys = std::move(keys);
  return ranking;
}

}  // namespace

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::vote: return "vote";
    case Strategy::merge: return "merge";
    case Strategy::max: return "max";
    case Strategy::merge_sumnorm: return "merge-sumnorm";
    case Strategy::merge_gausnorm: return "merge-gausnorm";
    case Strategy::round_robin: return "roundrobin";
    case Strategy::minrank: return "minrank";
  }
  throw ValidationError("unreachable strategy value");
}

Strategy parse_strategy(const std::string& name) {
  if (name == "vote") return Strategy::vote;
  if (name == "merge") return Strategy::merge;
  if (name == "max") return Strategy::max;
  if (name == "merge-sumnorm") return Strategy::merge_sumnorm;
  if (name == "merge-gausnorm") return Strategy::merge_gausnorm;
  if (name == "roundrobin") return Strategy::round_robin;
  if (name == "minrank") return Strategy::minrank;
  throw ValidationError(
      "unknown strategy \"" + name +
      "\" (expected vote, merge, max, merge-sumnorm, merge-gausnorm, "
      "roundrobin, or minrank)");
}

std::uint64_t selection_size(double ratio, std::uint64_t n) {
  if (!(ratio > 0.0) || ratio > 1.0)
    throw ValidationError("selection ratio must lie in (0, 1]");
  if (n == 0) throw ValidationError("cannot select from zero examples");
  // 0.2 * 2000 evaluates to slightly above 400 in binary; back off by a
  // relative epsilon before taking the ceiling so exact products stay exact.
  const double x = ratio * static_cast<double>(n);
  const double guarded = std::ceil(x - 1e-9 * std::max(1.0, std::fabs(x)));
  auto m = static_cast<std::uint64_t>(std::max(guarded, 1.0));
  return std::min(m, n);
}

ThresholdSet thresholds(const ScoreTable& table, double ratio) {
  check_nonempty(table);
  ThresholdSet set;
  set.ratio = ratio;
  set.rank = selection_size(ratio, table.n);
  set.cutoffs.resize(table.k);
  std::vector<double> column;
  for (std::uint32_t t = 0; t < table.k; ++t) {
    column = table.column(t);
    std::nth_element(column.begin(), column.begin() + (set.rank - 1),
                     column.end(), std::greater<double>());
    set.cutoffs[t] = column[set.rank - 1];
  }
  return set;
}

VoteTally vote_tally(const ScoreTable& table, const ThresholdSet& cutoffs) {
  check_nonempty(table);
  if (cutoffs.cutoffs.size() != table.k)
    throw ValidationError("threshold set task count does not match table");

  VoteTally tally;
  tally.k = table.k;
  tally.votes.assign(table.n, 0);
  for (std::uint64_t i = 0; i < table.n; ++i)
    for (std::uint32_t t = 0; t < table.k; ++t)
      if (table.at(i, t) >= cutoffs.cutoffs[t]) ++tally.votes[i];
  return tally;
}

AggregateRanking merge_scores(const ScoreTable& table) {
  check_nonempty(table);
  std::vector<double> keys(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) {
    double sum = 0.0;
    for (std::uint32_t t = 0; t < table.k; ++t) sum += table.at(i, t);
    keys[i] = sum;
  }
  return ranking_from_keys(Strategy::merge, std::move(keys));
}

AggregateRanking max_scores(const ScoreTable& table) {
  check_nonempty(table);
  std::vector<double> keys(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) {
    double best = table.at(i, 0);
    for (std::uint32_t t = 1; t < table.k; ++t)
      best = std::max(best, table.at(i, t));
    keys[i] = best;
  }
  return ranking_from_keys(Strategy::max, std::move(keys));
}

AggregateRanking merge_sumnorm(const ScoreTable& table) {
  check_nonempty(table);
  std::vector<double> divisors(table.k);
  std::vector<std::string> warnings;
  for (std::uint32_t t = 0; t < table.k; ++t) {
    double sum = 0.0;
    for (std::uint64_t i = 0; i < table.n; ++i) sum += table.at(i, t);
    if (std::fabs(sum) < kColumnEps) {
      warnings.push_back("column \"" + table.task_names[t] +
                         "\" has a near-zero sum; left unnormalized");
      divisors[t] = 1.0;
    } else {
      divisors[t] = sum;
    }
  }

  std::vector<double> keys(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) {
    double sum = 0.0;
    for (std::uint32_t t = 0; t < table.k; ++t)
      sum += table.at(i, t) / divisors[t];
    keys[i] = sum;
  }
  AggregateRanking ranking =
      ranking_from_keys(Strategy::merge_sumnorm, std::move(keys));
  ranking.warnings = std::move(warnings);
  return ranking;
}

AggregateRanking merge_gausnorm(const ScoreTable& table) {
  check_nonempty(table);
  std::vector<double> means(table.k), stddevs(table.k);
  for (std::uint32_t t = 0; t < table.k; ++t) {
    double sum = 0.0;
    for (std::uint64_t i = 0; i < table.n; ++i) sum += table.at(i, t);
    means[t] = sum / static_cast<double>(table.n);
    double sumsq = 0.0;
    for (std::uint64_t i = 0; i < table.n; ++i) {
      const double d = table.at(i, t) - means[t];
      sumsq += d * d;
    }
    stddevs[t] = std::sqrt(sumsq / static_cast<double>(table.n));
  }

  std::vector<double> keys(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) {
    double sum = 0.0;
    for (std::uint32_t t = 0; t < table.k; ++t)
      if (stddevs[t] >= kColumnEps)
        sum += (table.at(i, t) - means[t]) / stddevs[t];
    keys[i] = sum;
  }
  return ranking_from_keys(Strategy::merge_gausnorm, std::move(keys));
}

std::vector<std::vector<std::uint64_t>> rank_table(const ScoreTable& table) {
  check_nonempty(table);
  std::vector<std::vector<std::uint64_t>> ranks(
      table.k, std::vector<std::uint64_t>(table.n));
  std::vector<std::uint64_t> order(table.n);
  for (std::uint32_t t = 0; t < table.k; ++t) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::uint64_t a, std::uint64_t b) {
                if (table.at(a, t) != table.at(b, t))
                  return table.at(a, t) > table.at(b, t);
                return a < b;
              });
    for (std::uint64_t pos = 0; pos < table.n; ++pos)
      ranks[t][order[pos]] = pos + 1;
  }
  return ranks;
}

SelectionResult round_robin_select(const ScoreTable& table, std::uint64_t m) {
  check_nonempty(table);
  if (m > table.n)
    throw ValidationError("cannot select " + std::to_string(m) + " of " +
                          std::to_string(table.n) + " examples");

  // Per-task preference lists (best first) and a cursor into each.
  std::vector<std::vector<std::uint64_t>> preference(table.k);
  {
    std::vector<std::uint64_t> order(table.n);
    for (std::uint32_t t = 0; t < table.k; ++t) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::uint64_t a, std::uint64_t b) {
                  if (table.at(a, t) != table.at(b, t))
                    return table.at(a, t) > table.at(b, t);
                  return a < b;
                });
      preference[t] = order;
    }
  }

  SelectionResult result;
  result.strategy = Strategy::round_robin;
  result.ratio = static_cast<double>(m) / static_cast<double>(table.n);
  result.m = m;

  std::vector<std::uint8_t> taken(table.n, 0);
  std::vector<std::uint64_t> cursor(table.k, 0);
  std::uint32_t t = 0;
  while (result.selected.size() < m) {
    while (taken[preference[t][cursor[t]]]) ++cursor[t];
    const std::uint64_t id = preference[t][cursor[t]];
    taken[id] = 1;
    result.selected.push_back(
        {id, static_cast<double>(t), static_cast<double>(cursor[t] + 1)});
    t = (t + 1) % table.k;
  }
  return result;
}

SelectionResult minrank_select(const ScoreTable& table, std::uint64_t m) {
  check_nonempty(table);
  if (m > table.n)
    throw ValidationError("cannot select " + std::to_string(m) + " of " +
                          std::to_string(table.n) + " examples");

  const std::vector<std::vector<std::uint64_t>> ranks = rank_table(table);
  std::vector<std::uint64_t> best(table.n,
                                  std::numeric_limits<std::uint64_t>::max());
  std::vector<std::uint64_t> second(table.n,
                                    std::numeric_limits<std::uint64_t>::max());
  for (std::uint64_t i = 0; i < table.n; ++i) {
    for (std::uint32_t t = 0; t < table.k; ++t) {
      const std::uint64_t r = ranks[t][i];
      if (r < best[i]) {
        second[i] = best[i];
        best[i] = r;
      } else if (r < second[i]) {
        second[i] = r;
      }
    }
    if (table.k == 1) second[i] = best[i];
  }

  std::vector<std::uint64_t> order(table.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (best[a] != best[b]) return best[a] < best[b];
    if (second[a] != second[b]) return second[a] < second[b];
    return a < b;
  });

  SelectionResult result;
  result.strategy = Strategy::minrank;
  result.ratio = static_cast<double>(m) / static_cast<double>(table.n);
  result.m = m;
  for (std::uint64_t pos = 0; pos < m; ++pos) {
    const std::uint64_t id = order[pos];
    result.selected.push_back({id, static_cast<double>(best[id]),
                               static_cast<double>(second[id])});
  }
  return result;
}

}  // namespace icons
