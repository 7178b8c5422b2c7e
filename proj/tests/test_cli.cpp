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
// End-to-end tests of the command-line tool: every subcommand is exercised
// against a small synthetic world through the real binary (its path arrives
// via the ICONS_CLI_PATH compile definition), checking exit codes, the JSON
// error contract on stderr, and byte-identical reruns.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "icons/manifest.hpp"
#include "icons/selection.hpp"
#include "icons/shard.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace icons;
using icons::test::TempDir;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;  // captured stdout
  std::string err;  // captured stderr
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// Runs the binary with `args`, redirecting both streams into `dir`.
CliRun run_cli(const std::string& args, const std::filesystem::path& dir) {
  const std::filesystem::path out_path = dir / "last_stdout.txt";
  const std::filesystem::path err_path = dir / "last_stderr.txt";
  const std::string command = std::string(ICONS_CLI_PATH) + " " + args +
                              " > " + out_path.string() + " 2> " +
                              err_path.string();
  const int status = std::system(command.c_str());
  CliRun run;
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  run.out = slurp(out_path);
  run.err = slurp(err_path);
  return run;
}

// The stderr contract: a single JSON object line with "error" and "kind".
std::string error_kind(const CliRun& run) {
  const nlohmann::json doc = nlohmann::json::parse(run.err);
  REQUIRE(doc.contains("error"));
  return doc.at("kind").get<std::string>();
}

std::vector<std::string> id_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("bad command lines exit 2 with a config error") {
  TempDir dir("cli_config");
  const CliRun none = run_cli("", dir.path());
  CHECK(none.exit_code == 2);
  CHECK(error_kind(none) == "config");

  const CliRun unknown = run_cli("frobnicate", dir.path());
  CHECK(unknown.exit_code == 2);
  CHECK(error_kind(unknown) == "config");

  const CliRun missing = run_cli("warmup", dir.path());  // lacks --world/--out
  CHECK(missing.exit_code == 2);
  CHECK(error_kind(missing) == "config");
}

TEST_CASE("help exits 0") {
  TempDir dir("cli_help");
  const CliRun help = run_cli("--help", dir.path());
  CHECK(help.exit_code == 0);
  const CliRun sub_help = run_cli("select --help", dir.path());
  CHECK(sub_help.exit_code == 0);
}

TEST_CASE("missing inputs exit 4 with an io error") {
  TempDir dir("cli_io");
  const CliRun run = run_cli("select --table " +
                                 (dir.path() / "absent.table").string() +
                                 " --out " + (dir.path() / "s").string() +
                                 " --ratio 0.2",
                             dir.path());
  CHECK(run.exit_code == 4);
  CHECK(error_kind(run) == "io");
}

TEST_CASE("malformed inputs exit 3 with a format error") {
  TempDir dir("cli_format");
  const auto manifest_path = dir.path() / "manifest.json";
  {
    std::ofstream out(manifest_path);
    out << "this is not json\n";
  }
  const CliRun run = run_cli("influence --manifest " + manifest_path.string() +
                                 " --out " + (dir.path() / "t").string(),
                             dir.path());
  CHECK(run.exit_code == 3);
  CHECK(error_kind(run) == "format");
}

TEST_CASE("the full pipeline runs, reruns byte-identically, and evaluates") {
  TempDir dir("cli_pipeline");
  const std::string world_dir = (dir.path() / "world").string();
  const std::string params_path = (dir.path() / "warmup.json").string();
  const std::string grads_dir = (dir.path() / "grads").string();
  const std::string proj_dir = (dir.path() / "projected").string();
  const std::string table_path = (dir.path() / "scores.table").string();

  // gen-synth: a small two-task world.
  const CliRun gen = run_cli(
      "gen-synth --out " + world_dir +
          " --seed 7 --feature-dim 6 --classes 4 --tasks 2 --pool-size 60 "
          "--val-per-task 8",
      dir.path());
  REQUIRE(gen.exit_code == 0);

  // The written manifest cross-checks against the shard headers it names.
  const Manifest manifest = load_manifest(world_dir + "/manifest.json");
  REQUIRE(manifest.train_shards.size() == 1);
  REQUIRE(manifest.tasks.size() == 2);
  CHECK(manifest.total_train_count() == 60);
  const FeatureShard pool = read_shard(manifest.train_shard_path(0));
  CHECK(pool.count == manifest.train_shards[0].count);
  CHECK(pool.dim == manifest.feature_dim);
  for (std::size_t t = 0; t < manifest.tasks.size(); ++t) {
    const FeatureShard val = read_shard(manifest.task_shard_path(t));
    CHECK(val.count == manifest.tasks[t].count);
    CHECK(val.count == 8);
  }

  // warmup -> grads -> project -> influence.
  REQUIRE(run_cli("warmup --world " + world_dir + " --out " + params_path +
                      " --seed 3",
                  dir.path())
              .exit_code == 0);
  REQUIRE(run_cli("grads --world " + world_dir + " --params " + params_path +
                      " --out " + grads_dir,
                  dir.path())
              .exit_code == 0);

  // Influence refuses raw (unprojected, unnormalized) gradients.
  const CliRun raw = run_cli("influence --manifest " + grads_dir +
                                 "/manifest.json --out " +
                                 (dir.path() / "raw.table").string(),
                             dir.path());
  CHECK(raw.exit_code == 3);
  CHECK(error_kind(raw) == "validation");

  REQUIRE(run_cli("project --manifest " + grads_dir + "/manifest.json" +
                      " --out " + proj_dir + " --proj-dim 16 --seed 11",
                  dir.path())
              .exit_code == 0);

  // Projecting an already-normalized manifest is refused.
  const CliRun reproject = run_cli("project --manifest " + proj_dir +
                                       "/manifest.json --out " +
                                       (dir.path() / "p2").string() +
                                       " --proj-dim 8",
                                   dir.path());
  CHECK(reproject.exit_code == 3);
  CHECK(error_kind(reproject) == "validation");

  REQUIRE(run_cli("influence --manifest " + proj_dir + "/manifest.json" +
                      " --out " + table_path,
                  dir.path())
              .exit_code == 0);

  // Rerunning influence reproduces the table byte for byte.
  const std::string table_again = (dir.path() / "scores2.table").string();
  REQUIRE(run_cli("influence --manifest " + proj_dir + "/manifest.json" +
                      " --out " + table_again,
                  dir.path())
              .exit_code == 0);
  CHECK(slurp(table_path) == slurp(table_again));
  CHECK(slurp(table_path + ".json") == slurp(table_again + ".json"));

  // select: two ratios in one invocation, plus an idempotence rerun.
  const std::string select_dir = (dir.path() / "select").string();
  REQUIRE(run_cli("select --table " + table_path + " --out " + select_dir +
                      " --strategy vote --ratio 0.25 --ratio 1.0 --seed 5",
                  dir.path())
              .exit_code == 0);
  const auto quarter = id_lines(select_dir + "/vote_0.25.ids");
  CHECK(quarter.size() == 15);
  const auto full = id_lines(select_dir + "/vote_1.ids");
  CHECK(full.size() == 60);
  std::set<std::string> unique(full.begin(), full.end());
  CHECK(unique.size() == 60);

  const std::string select_again = (dir.path() / "select2").string();
  REQUIRE(run_cli("select --table " + table_path + " --out " + select_again +
                      " --strategy vote --ratio 0.25 --ratio 1.0 --seed 5",
                  dir.path())
              .exit_code == 0);
  CHECK(slurp(select_dir + "/vote_0.25.ids") ==
        slurp(select_again + "/vote_0.25.ids"));
  CHECK(slurp(select_dir + "/vote_0.25.json") ==
        slurp(select_again + "/vote_0.25.json"));

  // An unknown strategy is a validation failure.
  const CliRun bogus = run_cli("select --table " + table_path + " --out " +
                                   (dir.path() / "s3").string() +
                                   " --strategy bogus --ratio 0.2",
                               dir.path());
  CHECK(bogus.exit_code == 3);
  CHECK(error_kind(bogus) == "validation");

  // aggregate: the full preference order, one "id\tkey" line per example.
  const std::string keys_path = (dir.path() / "keys.tsv").string();
  REQUIRE(run_cli("aggregate --table " + table_path + " --out " + keys_path +
                      " --strategy merge",
                  dir.path())
              .exit_code == 0);
  CHECK(id_lines(keys_path).size() == 60);

  // stats: selecting everything leaves no example unvoted.
  const std::string stats_path = (dir.path() / "stats.json").string();
  REQUIRE(run_cli("stats --table " + table_path + " --out " + stats_path +
                      " --ratio 0.05 --ratio 0.2 --ratio 1.0",
                  dir.path())
              .exit_code == 0);
  {
    std::ifstream in(stats_path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    REQUIRE(doc.at("rows").size() == 3);
    CHECK(doc.at("rows").back().at("ratio").get<double>() == 1.0);
    CHECK(doc.at("rows").back().at("zero_vote_fraction").get<double>() == 0.0);
  }

  // overlap: every specialist selection overlaps itself completely.
  const std::string overlap_path = (dir.path() / "overlap.json").string();
  REQUIRE(run_cli("overlap --table " + table_path + " --out " + overlap_path +
                      " --ratio 0.25",
                  dir.path())
              .exit_code == 0);
  {
    std::ifstream in(overlap_path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    const auto& pairwise = doc.at("pairwise");
    REQUIRE(pairwise.size() == 2);
    for (std::size_t t = 0; t < 2; ++t)
      CHECK(pairwise.at(t).at(t).get<double>() == 1.0);
  }

  // eval on the full selection: relative scores are exactly 1.
  const std::string eval_path = (dir.path() / "eval.json").string();
  REQUIRE(run_cli("eval --world " + world_dir + " --ids " + select_dir +
                      "/vote_1.ids --out " + eval_path + " --seed 3",
                  dir.path())
              .exit_code == 0);
  {
    std::ifstream in(eval_path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("mean_rel").get<double>() == 1.0);
    for (const auto& r : doc.at("rel")) CHECK(r.get<double>() == 1.0);
  }

  // eval on the quarter selection simply succeeds and reports both sides.
  const std::string eval_quarter = (dir.path() / "eval_quarter.json").string();
  REQUIRE(run_cli("eval --world " + world_dir + " --ids " + select_dir +
                      "/vote_0.25.ids --out " + eval_quarter + " --seed 3",
                  dir.path())
              .exit_code == 0);
  {
    std::ifstream in(eval_quarter);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("subset").size() == 2);
    CHECK(doc.at("full").size() == 2);
    CHECK(doc.at("rel").size() == 2);
  }

  // gen-synth is idempotent: the same seed writes the same bytes.
  const std::string world_again = (dir.path() / "world2").string();
  REQUIRE(run_cli("gen-synth --out " + world_again +
                      " --seed 7 --feature-dim 6 --classes 4 --tasks 2 "
                      "--pool-size 60 --val-per-task 8",
                  dir.path())
              .exit_code == 0);
  CHECK(slurp(world_dir + "/world.json") == slurp(world_again + "/world.json"));
  CHECK(slurp(world_dir + "/pool_features.shard") ==
        slurp(world_again + "/pool_features.shard"));
}

TEST_CASE("gen-synth with default arguments writes the standard world") {
  TempDir dir("cli_default_world");
  const std::string world_dir = (dir.path() / "world").string();
  REQUIRE(run_cli("gen-synth --out " + world_dir, dir.path()).exit_code == 0);
  const Manifest manifest = load_manifest(world_dir + "/manifest.json");
  CHECK(manifest.train_shards.size() == 1);
  CHECK(manifest.tasks.size() == 5);
  CHECK(manifest.total_train_count() == 2000);
  for (std::size_t t = 0; t < manifest.tasks.size(); ++t) {
    const FeatureShard val = read_shard(manifest.task_shard_path(t));
    CHECK(val.count == 50);
    CHECK(val.dim == 20);
  }
}
