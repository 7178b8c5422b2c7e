// Copyright 2026 The icons Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Shared test utilities: scratch directories, random fixtures, and
// independent oracle implementations.  The oracles deliberately re-derive
// every quantity with the most literal code possible (double loops,
// std::sort) so they cannot share a bug with the library kernels.

#ifndef ICONS_TESTS_SUPPORT_HPP_
#define ICONS_TESTS_SUPPORT_HPP_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "icons/rng.hpp"
#include "icons/score_table.hpp"
#include "icons/selection_result.hpp"
#include "icons/shard.hpp"

namespace icons::test {

// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const auto base = std::filesystem::temp_directory_path();
    // Distinct per process and per instance so parallel ctest jobs never
    // collide.
    static std::uint64_t counter = 0;
    path_ = base / ("icons_test_" + tag + "_" +
                    std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// --- Random fixtures ---------------------------------------------------------

inline FeatureShard random_shard(SplitMix64& rng, std::uint64_t count,
                                 std::uint32_t dim, std::uint64_t base_id = 0) {
  FeatureShard shard;
  shard.dim = dim;
  shard.count = count;
  shard.base_id = base_id;
  shard.values.resize(count * dim);
  for (float& v : shard.values) {
    v = static_cast<float>(rng.next_double() * 2.0 - 1.0);
  }
  return shard;
}

inline FeatureShard normalized_random_shard(SplitMix64& rng,
                                            std::uint64_t count,
                                            std::uint32_t dim,
                                            std::uint64_t base_id = 0) {
  FeatureShard shard = random_shard(rng, count, dim, base_id);
  for (std::uint64_t r = 0; r < count; ++r) {
    double sumsq = 0.0;
    for (std::uint32_t c = 0; c < dim; ++c) {
      const double v = shard.values[r * dim + c];
      sumsq += v * v;
    }
    const double norm = std::sqrt(sumsq);
    for (std::uint32_t c = 0; c < dim; ++c) {
      shard.values[r * dim + c] =
          static_cast<float>(shard.values[r * dim + c] / norm);
    }
  }
  return shard;
}

inline ScoreTable random_table(SplitMix64& rng, std::uint64_t n,
                               std::uint32_t k) {
  ScoreTable table;
  table.n = n;
  table.k = k;
  for (std::uint32_t c = 0; c < k; ++c) {
    table.task_names.push_back("task" + std::to_string(c));
  }
  table.scores.resize(n * k);
  for (double& s : table.scores) s = rng.next_double() * 2.0 - 1.0;
  return table;
}

// A table whose columns each hold n distinct values (a shuffled arithmetic
// ramp), for invariants that require tie-free scores.
inline ScoreTable distinct_table(SplitMix64& rng, std::uint64_t n,
                                 std::uint32_t k) {
  ScoreTable table;
  table.n = n;
  table.k = k;
  for (std::uint32_t c = 0; c < k; ++c) {
    table.task_names.push_back("task" + std::to_string(c));
  }
  table.scores.resize(n * k);
  for (std::uint32_t c = 0; c < k; ++c) {
    std::vector<double> column(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      column[i] = -1.0 + (2.0 * static_cast<double>(i)) /
                             static_cast<double>(n);
    }
    rng.shuffle(column);
    for (std::uint64_t i = 0; i < n; ++i) table.scores[i * k + c] = column[i];
  }
  return table;
}

// --- Influence oracles -------------------------------------------------------

// Literal double-loop dot products; no blocking, no library kernel.
inline std::vector<double> oracle_influence_entries(const FeatureShard& train,
                                                    const FeatureShard& val) {
  std::vector<double> entries(train.count * val.count, 0.0);
  for (std::uint64_t i = 0; i < train.count; ++i) {
    for (std::uint64_t j = 0; j < val.count; ++j) {
      double acc = 0.0;
      for (std::uint32_t c = 0; c < train.dim; ++c) {
        acc += static_cast<double>(train.values[i * train.dim + c]) *
               static_cast<double>(val.values[j * val.dim + c]);
      }
      entries[i * val.count + j] = acc;
    }
  }
  return entries;
}

inline std::vector<double> oracle_mean_scores(const std::vector<double>& entries,
                                              std::uint64_t n_train,
                                              std::uint64_t n_val) {
  std::vector<double> scores(n_train, 0.0);
  for (std::uint64_t i = 0; i < n_train; ++i) {
    double acc = 0.0;
    for (std::uint64_t j = 0; j < n_val; ++j) acc += entries[i * n_val + j];
    scores[i] = acc / static_cast<double>(n_val);
  }
  return scores;
}

// --- Aggregation oracles -----------------------------------------------------

// r-th largest value of column k (r is 1-based), by full sort.
inline double oracle_rth_largest(const ScoreTable& table, std::uint32_t k,
                                 std::uint64_t r) {
  std::vector<double> column(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) column[i] = table.at(i, k);
  std::sort(column.begin(), column.end(), std::greater<double>());
  return column[r - 1];
}

inline std::vector<std::uint32_t> oracle_votes(const ScoreTable& table,
                                               std::uint64_t r) {
  std::vector<std::uint32_t> votes(table.n, 0);
  for (std::uint32_t k = 0; k < table.k; ++k) {
    const double cutoff = oracle_rth_largest(table, k, r);
    for (std::uint64_t i = 0; i < table.n; ++i) {
      if (table.at(i, k) >= cutoff) ++votes[i];
    }
  }
  return votes;
}

// 1-based competition ranks with id tie-break: sort (score desc, id asc).
inline std::vector<std::vector<std::uint64_t>> oracle_ranks(
    const ScoreTable& table) {
  std::vector<std::vector<std::uint64_t>> ranks(
      table.k, std::vector<std::uint64_t>(table.n, 0));
  for (std::uint32_t k = 0; k < table.k; ++k) {
    std::vector<std::uint64_t> ids(table.n);
    for (std::uint64_t i = 0; i < table.n; ++i) ids[i] = i;
    std::sort(ids.begin(), ids.end(),
              [&](std::uint64_t a, std::uint64_t b) {
                if (table.at(a, k) != table.at(b, k)) {
                  return table.at(a, k) > table.at(b, k);
                }
                return a < b;
              });
    for (std::uint64_t pos = 0; pos < ids.size(); ++pos) {
      ranks[k][ids[pos]] = pos + 1;
    }
  }
  return ranks;
}

// Ordering shared by the merge-family oracles: key desc, id asc.
inline std::vector<std::uint64_t> oracle_order_by_key(
    const std::vector<double>& keys) {
  std::vector<std::uint64_t> ids(keys.size());
  for (std::uint64_t i = 0; i < ids.size(); ++i) ids[i] = i;
  std::sort(ids.begin(), ids.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (keys[a] != keys[b]) return keys[a] > keys[b];
    return a < b;
  });
  return ids;
}

inline std::vector<double> oracle_merge_keys(const ScoreTable& table) {
  std::vector<double> keys(table.n, 0.0);
  for (std::uint64_t i = 0; i < table.n; ++i) {
    for (std::uint32_t k = 0; k < table.k; ++k) keys[i] += table.at(i, k);
  }
  return keys;
}

inline std::vector<double> oracle_max_keys(const ScoreTable& table) {
  std::vector<double> keys(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) {
    double best = table.at(i, 0);
    for (std::uint32_t k = 1; k < table.k; ++k) {
      best = std::max(best, table.at(i, k));
    }
    keys[i] = best;
  }
  return keys;
}

inline std::vector<double> oracle_sumnorm_keys(const ScoreTable& table) {
  std::vector<double> keys(table.n, 0.0);
  for (std::uint32_t k = 0; k < table.k; ++k) {
    double total = 0.0;
    for (std::uint64_t i = 0; i < table.n; ++i) total += table.at(i, k);
    const double divisor = std::fabs(total) < 1e-12 ? 1.0 : total;
    for (std::uint64_t i = 0; i < table.n; ++i) {
      keys[i] += table.at(i, k) / divisor;
    }
  }
  return keys;
}

inline std::vector<double> oracle_gausnorm_keys(const ScoreTable& table) {
  std::vector<double> keys(table.n, 0.0);
  for (std::uint32_t k = 0; k < table.k; ++k) {
    double mean = 0.0;
    for (std::uint64_t i = 0; i < table.n; ++i) mean += table.at(i, k);
    mean /= static_cast<double>(table.n);
    double var = 0.0;
    for (std::uint64_t i = 0; i < table.n; ++i) {
      const double d = table.at(i, k) - mean;
      var += d * d;
    }
    const double sigma = std::sqrt(var / static_cast<double>(table.n));
    if (sigma < 1e-12) continue;
    for (std::uint64_t i = 0; i < table.n; ++i) {
      keys[i] += (table.at(i, k) - mean) / sigma;
    }
  }
  return keys;
}

// Step-by-step round-robin simulation: tasks take turns in column order,
// each consuming its best not-yet-taken id.
inline std::vector<std::uint64_t> oracle_round_robin(const ScoreTable& table,
                                                     std::uint64_t m) {
  std::vector<std::vector<std::uint64_t>> preference(table.k);
  for (std::uint32_t k = 0; k < table.k; ++k) {
    std::vector<double> column(table.n);
    for (std::uint64_t i = 0; i < table.n; ++i) column[i] = table.at(i, k);
    std::vector<std::uint64_t> ids(table.n);
    for (std::uint64_t i = 0; i < table.n; ++i) ids[i] = i;
    std::sort(ids.begin(), ids.end(), [&](std::uint64_t a, std::uint64_t b) {
      if (column[a] != column[b]) return column[a] > column[b];
      return a < b;
    });
    preference[k] = std::move(ids);
  }
  std::vector<bool> taken(table.n, false);
  std::vector<std::size_t> cursor(table.k, 0);
  std::vector<std::uint64_t> picks;
  std::uint32_t turn = 0;
  while (picks.size() < m) {
    std::size_t& c = cursor[turn];
    while (c < table.n && taken[preference[turn][c]]) ++c;
    if (c < table.n) {
      taken[preference[turn][c]] = true;
      picks.push_back(preference[turn][c]);
    }
    turn = (turn + 1) % table.k;
  }
  return picks;
}

// Exhaustive min-rank: key (best rank, second-smallest rank, id) ascending.
inline std::vector<std::uint64_t> oracle_minrank(const ScoreTable& table,
                                                 std::uint64_t m) {
  const auto ranks = oracle_ranks(table);
  std::vector<std::uint64_t> ids(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) ids[i] = i;
  auto best_pair = [&](std::uint64_t i) {
    std::vector<std::uint64_t> r(table.k);
    for (std::uint32_t k = 0; k < table.k; ++k) r[k] = ranks[k][i];
    std::sort(r.begin(), r.end());
    const std::uint64_t second = table.k > 1 ? r[1] : r[0];
    return std::make_pair(r[0], second);
  };
  std::sort(ids.begin(), ids.end(), [&](std::uint64_t a, std::uint64_t b) {
    const auto pa = best_pair(a);
    const auto pb = best_pair(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  ids.resize(m);
  return ids;
}

// Consensus strength c_i = sum over tasks of (1 - (rank-1)/N).
inline std::vector<double> oracle_strength(const ScoreTable& table) {
  const auto ranks = oracle_ranks(table);
  std::vector<double> strength(table.n, 0.0);
  for (std::uint64_t i = 0; i < table.n; ++i) {
    for (std::uint32_t k = 0; k < table.k; ++k) {
      strength[i] += 1.0 - static_cast<double>(ranks[k][i] - 1) /
                               static_cast<double>(table.n);
    }
  }
  return strength;
}

// Vote selection: votes desc, strength desc, id asc; take the first m.
inline std::vector<std::uint64_t> oracle_vote_selection(
    const ScoreTable& table, std::uint64_t r, std::uint64_t m) {
  const auto votes = oracle_votes(table, r);
  const auto strength = oracle_strength(table);
  std::vector<std::uint64_t> ids(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) ids[i] = i;
  std::sort(ids.begin(), ids.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (votes[a] != votes[b]) return votes[a] > votes[b];
    if (strength[a] != strength[b]) return strength[a] > strength[b];
    return a < b;
  });
  ids.resize(m);
  return ids;
}

// Top-m ids of one column under (score desc, id asc).
inline std::vector<std::uint64_t> oracle_column_top(const ScoreTable& table,
                                                    std::uint32_t k,
                                                    std::uint64_t m) {
  std::vector<std::uint64_t> ids(table.n);
  for (std::uint64_t i = 0; i < table.n; ++i) ids[i] = i;
  std::sort(ids.begin(), ids.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (table.at(a, k) != table.at(b, k)) return table.at(a, k) > table.at(b, k);
    return a < b;
  });
  ids.resize(m);
  return ids;
}

inline std::vector<std::uint64_t> selected_ids(const SelectionResult& result) {
  std::vector<std::uint64_t> ids;
  ids.reserve(result.selected.size());
  for (const auto& e : result.selected) ids.push_back(e.id);
  return ids;
}

}  // namespace icons::test

#endif  // ICONS_TESTS_SUPPORT_HPP_
