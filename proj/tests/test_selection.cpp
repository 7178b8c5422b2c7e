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
// Tests for consensus-vote selection, vote statistics, overlap analysis,
// the relative metric, and their serialized forms.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "icons/aggregation.hpp"
#include "icons/error.hpp"
#include "icons/selection.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace icons;
using icons::test::TempDir;
using icons::test::selected_ids;

namespace {

ScoreTable columns_table(const std::vector<std::vector<double>>& columns) {
  ScoreTable table;
  table.k = static_cast<std::uint32_t>(columns.size());
  table.n = columns.front().size();
  for (std::uint32_t k = 0; k < table.k; ++k) {
    table.task_names.push_back("task" + std::to_string(k));
  }
  table.scores.resize(table.n * table.k);
  for (std::uint32_t k = 0; k < table.k; ++k) {
    for (std::uint64_t i = 0; i < table.n; ++i) {
      table.scores[i * table.k + k] = columns[k][i];
    }
  }
  return table;
}

ScoreTable worked_example() {
  return columns_table({{0.9, 0.1, 0.5, 0.8, 0.2}, {0.15, 0.7, 0.6, 0.9, 0.1}});
}

}  // namespace

TEST_CASE("consensus strength sums per-task rank percentiles") {
  const ScoreTable table = worked_example();
  const std::vector<double> strength = consensus_strength(table);
  // Ranks col A: id0=1 id3=2 id2=3 id4=4 id1=5; col B: id3=1 id1=2 id2=3
  // id0=4 id4=5.  c_i = sum_k (1 - (rank-1)/5).
  CHECK(strength[0] == doctest::Approx(1.0 + 0.4).epsilon(1e-12));
  CHECK(strength[1] == doctest::Approx(0.2 + 0.8).epsilon(1e-12));
  CHECK(strength[2] == doctest::Approx(0.6 + 0.6).epsilon(1e-12));
  CHECK(strength[3] == doctest::Approx(0.8 + 1.0).epsilon(1e-12));
  CHECK(strength[4] == doctest::Approx(0.4 + 0.2).epsilon(1e-12));

  SplitMix64 rng(7);
  const ScoreTable random = icons::test::random_table(rng, 40, 3);
  const auto expected = icons::test::oracle_strength(random);
  const auto actual = consensus_strength(random);
  for (std::uint64_t i = 0; i < 40; ++i) {
    CHECK(actual[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("vote selection reproduces the worked example") {
  const ScoreTable table = worked_example();
  const ThresholdSet set = thresholds(table, 0.4);
  const VoteTally tally = vote_tally(table, set);
  const SelectionResult result = select_by_votes(tally, table, 0.4);

  CHECK(result.m == 2);
  REQUIRE(result.selected.size() == 2);
  // id 3 carries two votes; the boundary level 1 is resolved by consensus
  // strength: id 0 (1.4) beats id 1 (1.0).
  CHECK(result.selected[0].id == 3);
  CHECK(result.selected[0].key == 2.0);
  CHECK(result.selected[0].tie_break == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(result.selected[1].id == 0);
  CHECK(result.selected[1].key == 1.0);
  CHECK(result.selected[1].tie_break == doctest::Approx(1.4).epsilon(1e-12));

  CHECK(result.boundary_level == 1);
  CHECK(result.vote_histogram == std::vector<std::uint64_t>{2, 2, 1});
  REQUIRE(result.thresholds.size() == 2);
  CHECK(result.thresholds[0] == 0.8);
  CHECK(result.thresholds[1] == 0.7);
}

TEST_CASE("all-equal votes fall back to pure consensus-strength order") {
  // A constant column ties everyone at the threshold, so all five examples
  // hold one vote and the whole set is the boundary level; strength then
  // reduces to the id tie-break of the flat ranks.
  const ScoreTable table = columns_table({{0.5, 0.5, 0.5, 0.5, 0.5}});
  const ThresholdSet set = thresholds(table, 0.6);
  const VoteTally tally = vote_tally(table, set);
  CHECK(tally.votes == std::vector<std::uint32_t>{1, 1, 1, 1, 1});
  const SelectionResult result = select_by_votes(tally, table, 0.6);
  CHECK(selected_ids(result) == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(result.boundary_level == 1);
}

TEST_CASE("vote selection at p=1 returns every id") {
  SplitMix64 rng(11);
  const ScoreTable table = icons::test::random_table(rng, 20, 3);
  const SelectionResult result = select(table, Strategy::vote, 1.0, 5);
  CHECK(result.m == 20);
  CHECK(result.seed == 5);
  const std::vector<std::uint64_t> ids = selected_ids(result);
  const std::set<std::uint64_t> unique(ids.begin(), ids.end());
  CHECK(unique.size() == 20);
}

TEST_CASE("vote selection matches the exhaustive oracle on random tables") {
  SplitMix64 rng(13);
  for (int round = 0; round < 10; ++round) {
    const ScoreTable table = icons::test::random_table(rng, 30, 3);
    for (double p : {0.1, 0.4, 0.7}) {
      const SelectionResult result = select(table, Strategy::vote, p, 0);
      const std::uint64_t r = selection_size(p, 30);
      CHECK(selected_ids(result) ==
            icons::test::oracle_vote_selection(table, r, r));
    }
  }
}

TEST_CASE("vote dominance: no unselected example outvotes a selected one") {
  SplitMix64 rng(17);
  const ScoreTable table = icons::test::random_table(rng, 50, 4);
  const SelectionResult result = select(table, Strategy::vote, 0.3, 0);
  const ThresholdSet set = thresholds(table, 0.3);
  const VoteTally tally = vote_tally(table, set);

  std::vector<bool> chosen(50, false);
  std::uint32_t min_selected_vote = 4;
  for (const auto& e : result.selected) {
    chosen[e.id] = true;
    min_selected_vote = std::min(min_selected_vote, tally.votes[e.id]);
  }
  for (std::uint64_t i = 0; i < 50; ++i) {
    if (!chosen[i]) CHECK(tally.votes[i] <= min_selected_vote);
  }
}

TEST_CASE("weak nesting holds above the boundary level") {
  // Everything selected with votes strictly above v*(p) stays selected at a
  // larger ratio while its votes stay above the new boundary.
  SplitMix64 rng(19);
  const ScoreTable table = icons::test::distinct_table(rng, 40, 4);
  const SelectionResult small = select(table, Strategy::vote, 0.2, 0);
  const SelectionResult large = select(table, Strategy::vote, 0.5, 0);

  const VoteTally small_tally = vote_tally(table, thresholds(table, 0.2));
  const VoteTally large_tally = vote_tally(table, thresholds(table, 0.5));
  const auto large_ids = selected_ids(large);
  for (const auto& e : small.selected) {
    const bool above_small = small_tally.votes[e.id] >
                             static_cast<std::uint32_t>(small.boundary_level);
    const bool above_large = large_tally.votes[e.id] >
                             static_cast<std::uint32_t>(large.boundary_level);
    if (above_small && above_large) {
      CHECK(std::find(large_ids.begin(), large_ids.end(), e.id) !=
            large_ids.end());
    }
  }
}

TEST_CASE("the dispatcher routes every strategy and stamps provenance") {
  SplitMix64 rng(23);
  const ScoreTable table = icons::test::random_table(rng, 30, 3);

  for (Strategy s : {Strategy::vote, Strategy::merge, Strategy::max,
                     Strategy::merge_sumnorm, Strategy::merge_gausnorm,
                     Strategy::round_robin, Strategy::minrank}) {
    const SelectionResult result = select(table, s, 0.25, 77);
    CHECK(result.strategy == s);
    CHECK(result.ratio == 0.25);
    CHECK(result.seed == 77);
    CHECK(result.m == selection_size(0.25, 30));
    CHECK(result.selected.size() == result.m);
    std::set<std::uint64_t> unique;
    for (const auto& e : result.selected) {
      CHECK(e.id < 30);
      unique.insert(e.id);
    }
    CHECK(unique.size() == result.m);
  }

  // Merge-family dispatch agrees with the standalone rankings.
  const SelectionResult merged = select(table, Strategy::merge, 0.3, 0);
  const AggregateRanking ranking = merge_scores(table);
  for (std::uint64_t i = 0; i < merged.m; ++i) {
    CHECK(merged.selected[i].id == ranking.order[i]);
    CHECK(merged.selected[i].key == ranking.keys[ranking.order[i]]);
  }
}

TEST_CASE("vote statistics summarize tallies per ratio") {
  const ScoreTable table = worked_example();
  const VoteStats stats = vote_distribution_stats(table, {0.4, 1.0});
  CHECK(stats.k == 2);
  REQUIRE(stats.rows.size() == 2);

  // Votes at p=0.4 are [1,1,0,2,0]: mean 0.8, lower median 1, max 2,
  // zero fraction 0.4, boundary level 1 (from the worked selection).
  const VoteStatsRow& row = stats.rows[0];
  CHECK(row.ratio == 0.4);
  CHECK(row.mean == doctest::Approx(0.8).epsilon(1e-12));
  const double variance = (2 * (0.0 - 0.8) * (0.0 - 0.8) +
                           2 * (1.0 - 0.8) * (1.0 - 0.8) +
                           (2.0 - 0.8) * (2.0 - 0.8)) /
                          5.0;
  CHECK(row.stddev == doctest::Approx(std::sqrt(variance)).epsilon(1e-12));
  CHECK(row.median == 1);
  CHECK(row.max_vote == 2);
  CHECK(row.zero_vote_fraction == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(row.threshold == 1);

  // p=1: mean K, zero-vote fraction 0.
  CHECK(stats.rows[1].mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stats.rows[1].zero_vote_fraction == 0.0);
  CHECK(stats.rows[1].max_vote == 2);

  CHECK_THROWS_AS(vote_distribution_stats(table, {0.4, 1.5}), ValidationError);
}

TEST_CASE("vote statistics are monotone in the ratio") {
  SplitMix64 rng(29);
  const ScoreTable table = icons::test::random_table(rng, 60, 4);
  const VoteStats stats =
      vote_distribution_stats(table, {0.05, 0.2, 0.5, 0.9});
  for (std::size_t i = 1; i < stats.rows.size(); ++i) {
    CHECK(stats.rows[i].mean >= stats.rows[i - 1].mean);
    CHECK(stats.rows[i].zero_vote_fraction <=
          stats.rows[i - 1].zero_vote_fraction);
  }
}

TEST_CASE("specialist overlap counts set intersections") {
  // Identical columns: every overlap is 1.
  SplitMix64 rng(31);
  std::vector<double> column(20);
  for (double& v : column) v = rng.next_double();
  const ScoreTable twins = columns_table({column, column});
  const SelectionResult generalist = select(twins, Strategy::vote, 0.25, 0);
  const OverlapReport same = specialist_overlap(twins, 0.25, generalist);
  for (double v : same.pairwise) CHECK(v == 1.0);
  for (double v : same.generalist) CHECK(v == 1.0);

  // Reversed columns with p <= 0.5 and distinct scores: disjoint tops.
  std::vector<double> forward(20), backward(20);
  for (int i = 0; i < 20; ++i) {
    forward[i] = i;
    backward[i] = 20 - i;
  }
  const ScoreTable opposed = columns_table({forward, backward});
  const SelectionResult centre = select(opposed, Strategy::vote, 0.5, 0);
  const OverlapReport disjoint = specialist_overlap(opposed, 0.5, centre);
  CHECK(disjoint.pair(0, 0) == 1.0);
  CHECK(disjoint.pair(1, 1) == 1.0);
  CHECK(disjoint.pair(0, 1) == 0.0);
  CHECK(disjoint.pair(1, 0) == 0.0);

  // Random table: set-intersection oracle.
  const ScoreTable table = icons::test::random_table(rng, 100, 4);
  const SelectionResult vote = select(table, Strategy::vote, 0.2, 0);
  const OverlapReport report = specialist_overlap(table, 0.2, vote);
  const std::uint64_t m = selection_size(0.2, 100);
  std::vector<std::set<std::uint64_t>> tops;
  for (std::uint32_t k = 0; k < 4; ++k) {
    const auto ids = icons::test::oracle_column_top(table, k, m);
    tops.emplace_back(ids.begin(), ids.end());
  }
  const auto vote_ids = selected_ids(vote);
  const std::set<std::uint64_t> gen(vote_ids.begin(), vote_ids.end());
  for (std::uint32_t a = 0; a < 4; ++a) {
    for (std::uint32_t b = 0; b < 4; ++b) {
      std::uint64_t inter = 0;
      for (std::uint64_t id : tops[a]) inter += tops[b].count(id);
      CHECK(report.pair(a, b) ==
            doctest::Approx(static_cast<double>(inter) / m).epsilon(1e-12));
    }
    std::uint64_t with_gen = 0;
    for (std::uint64_t id : tops[a]) with_gen += gen.count(id);
    CHECK(report.generalist[a] ==
          doctest::Approx(static_cast<double>(with_gen) / gen.size())
              .epsilon(1e-12));
  }

  // Diagonal 1 everywhere on random data too.
  for (std::uint32_t a = 0; a < 4; ++a) CHECK(report.pair(a, a) == 1.0);
}

TEST_CASE("the relative metric is a mean of per-task ratios") {
  const EvalReport report =
      rel_metric({0.4, 0.9}, {0.8, 0.9}, {"alpha", "beta"});
  CHECK(report.rel[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.rel[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.mean_rel == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(report.task_names == std::vector<std::string>{"alpha", "beta"});

  // subset == full -> 1.0; half of full -> 0.5.
  CHECK(rel_metric({0.7, 0.7}, {0.7, 0.7}).mean_rel == 1.0);
  CHECK(rel_metric({0.35, 0.35}, {0.7, 0.7}).mean_rel ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(rel_metric({0.5}, {0.0}), ValidationError);
  CHECK_THROWS_AS(rel_metric({0.5}, {-0.1}), ValidationError);
  CHECK_THROWS_AS(rel_metric({0.5, 0.5}, {0.5}), ValidationError);
  CHECK_THROWS_AS(rel_metric({}, {}), ValidationError);
}

TEST_CASE("selection serialization round-trips and keeps its schema") {
  TempDir dir("selection_io");
  const ScoreTable table = worked_example();
  const SelectionResult result = select(table, Strategy::vote, 0.4, 9);
  const auto ids_path = dir.path() / "sel.ids";
  const auto report_path = dir.path() / "sel.json";
  save_selection(result, ids_path, report_path);

  CHECK(load_selection_ids(ids_path) == selected_ids(result));

  std::ifstream in(report_path);
  const nlohmann::json doc = nlohmann::json::parse(in);
  CHECK(doc.at("strategy") == "vote");
  CHECK(doc.at("p") == 0.4);
  CHECK(doc.at("M") == 2);
  CHECK(doc.at("boundary_level") == 1);
  CHECK(doc.at("seed") == 9);
  CHECK(doc.at("thresholds").size() == 2);
  CHECK(doc.at("vote_histogram").size() == 3);
  CHECK(doc.size() == 7);  // exactly the documented keys

  // The ids file is plain newline-delimited numbers in selection order.
  std::ifstream raw(ids_path);
  std::string line;
  std::getline(raw, line);
  CHECK(line == "3");
  std::getline(raw, line);
  CHECK(line == "0");

  // Garbage id files are rejected.
  {
    std::ofstream out(dir.path() / "bad.ids");
    out << "12\nfrog\n";
  }
  CHECK_THROWS_AS(load_selection_ids(dir.path() / "bad.ids"), FormatError);
  CHECK_THROWS_AS(load_selection_ids(dir.path() / "absent.ids"), IoError);
}

TEST_CASE("analysis reports serialize to the documented JSON shapes") {
  TempDir dir("report_io");
  SplitMix64 rng(37);
  const ScoreTable table = icons::test::random_table(rng, 30, 3);

  const VoteStats stats = vote_distribution_stats(table, {0.1, 0.5});
  const auto stats_path = dir.path() / "stats.json";
  save_vote_stats(stats, stats_path);
  {
    std::ifstream in(stats_path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("k") == 3);
    REQUIRE(doc.at("rows").size() == 2);
    const auto& row = doc.at("rows")[0];
    CHECK(row.at("ratio") == 0.1);
    CHECK(row.contains("mean"));
    CHECK(row.contains("stddev"));
    CHECK(row.contains("median"));
    CHECK(row.contains("max_vote"));
    CHECK(row.contains("zero_vote_fraction"));
    CHECK(row.contains("threshold"));
  }

  const SelectionResult generalist = select(table, Strategy::vote, 0.2, 0);
  const OverlapReport overlap = specialist_overlap(table, 0.2, generalist);
  const auto overlap_path = dir.path() / "overlap.json";
  save_overlap_report(overlap, overlap_path);
  {
    std::ifstream in(overlap_path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("ratio") == 0.2);
    CHECK(doc.at("tasks").size() == 3);
    REQUIRE(doc.at("pairwise").size() == 3);
    CHECK(doc.at("pairwise")[0].size() == 3);
    CHECK(doc.at("generalist").size() == 3);
  }

  const EvalReport eval = rel_metric({0.5, 0.6}, {1.0, 0.8}, {"a", "b"});
  const auto eval_path = dir.path() / "eval.json";
  save_eval_report(eval, eval_path);
  {
    std::ifstream in(eval_path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("tasks") == nlohmann::json({"a", "b"}));
    CHECK(doc.at("subset").size() == 2);
    CHECK(doc.at("full").size() == 2);
    CHECK(doc.at("rel").size() == 2);
    CHECK(doc.at("mean_rel") == doctest::Approx(0.625).epsilon(1e-12));
  }
}
