// tests/test_cli.cpp

// Copyright 2026  The vsv authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "vsv/cli/config.hpp"
#include "vsv/cli/experiment.hpp"
#include "vsv/core/common.hpp"
#include "vsv/corpus/generate.hpp"
#include "vsv/eval/scores.hpp"
#include "vsv/frontend/warp.hpp"

using namespace vsv;
using namespace vsv::cli;
using doctest::Contains;
using vsv_test::SlurpBytes;
using vsv_test::TempDir;

namespace fs = std::filesystem;

namespace {

void Spew(const std::string &path, const std::string &text) {
  std::ofstream os(path);
  os << text;
}

// Small corpus plus mfcc/gmm-ubm settings sized so a full pipeline run
// takes well under a second.
ExperimentConfig TinyConfig(const std::string &root, std::vector<int> grid) {
  ExperimentConfig cfg;
  cfg.corpus.num_speakers = 3;
  cfg.corpus.num_background_speakers = 4;
  cfg.corpus.num_phrases = 2;
  cfg.corpus.enroll_sessions = 2;
  cfg.corpus.test_sessions = 1;
  cfg.corpus.background_sessions = 2;
  cfg.corpus.seed = 7;
  cfg.corpus_dir = root + "/corpus";
  cfg.out_dir = root + "/out";
  cfg.features = {"mfcc"};
  cfg.backend = "gmm-ubm";
  cfg.grid = std::move(grid);
  cfg.workers = 1;
  cfg.seed = 5;
  cfg.ubm.num_components = 8;
  cfg.ubm.em_iterations = 3;
  cfg.ubm.kmeans_iterations = 2;
  return cfg;
}

ExperimentConfig FreshExperiment(const TempDir &dir, std::vector<int> grid) {
  ExperimentConfig cfg = TinyConfig(dir.Path(), std::move(grid));
  SynthCorpusChecked(cfg.corpus, cfg.corpus_dir, false);
  return cfg;
}

std::map<std::string, double> ScoreByKey(const eval::ScoreSet &set) {
  std::map<std::string, double> by_key;
  for (const auto &e : set.entries)
    by_key[e.model_id + "/" + e.test_id] = e.score;
  return by_key;
}

int RunTool(const std::string &args) {
  const int status =
      std::system((std::string(VSV_TOOL_PATH) + " " + args).c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parser reads sections, keys and comments") {
  const ConfigFile file = ConfigFile::ParseText(
      "# leading comment\n"
      "[alpha]\n"
      "name = hello world\n"
      "count = 42\n"
      "ratio = 0.5\n"
      "flag = true\n"
      "\n"
      "[beta]\n"
      "items = a b c\n",
      "inline");
  CHECK(file.Has("alpha", "name"));
  CHECK_FALSE(file.Has("alpha", "missing"));
  CHECK(file.GetString("alpha", "name", "") == "hello world");
  CHECK(file.GetInt("alpha", "count", 0) == 42);
  CHECK(file.GetDouble("alpha", "ratio", 0.0) == 0.5);
  CHECK(file.GetBool("alpha", "flag", false));
  CHECK(file.GetTokens("beta", "items") ==
        std::vector<std::string>{"a", "b", "c"});
  CHECK(file.GetInt("alpha", "absent", 7) == 7);
}

TEST_CASE("config parser rejects malformed input") {
  auto parse = [](const std::string &text) {
    return ConfigFile::ParseText(text, "bad");
  };
  CHECK_THROWS_AS(parse("key = 1\n"), ConfigError);  // before any section
  CHECK_THROWS_AS(parse("[s]\nkey =\n"), ConfigError);
  CHECK_THROWS_AS(parse("[s]\n= value\n"), ConfigError);
  CHECK_THROWS_AS(parse("[s]\nkey = 1\nkey = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[unclosed\nkey = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[s]\nno equals sign\n"), ConfigError);

  const ConfigFile file = ConfigFile::ParseText("[s]\nn = x\n", "bad");
  CHECK_THROWS_AS(file.GetInt("s", "n", 0), ConfigError);
  CHECK_THROWS_AS(file.GetDouble("s", "n", 0.0), ConfigError);
  CHECK_THROWS_AS(file.GetBool("s", "n", false), ConfigError);
}

TEST_CASE("experiment config guards against typos") {
  TempDir dir("cfg_typo");
  Spew(dir.Path("a.cfg"), "[experiment]\nfeaturez = mfcc\n");
  CHECK_THROWS_WITH_AS(LoadExperimentConfig(dir.Path("a.cfg")),
                       Contains("featurez"), ConfigError);
  Spew(dir.Path("b.cfg"), "[experimnet]\nfeatures = mfcc\n");
  CHECK_THROWS_WITH_AS(LoadExperimentConfig(dir.Path("b.cfg")),
                       Contains("experimnet"), ConfigError);
  Spew(dir.Path("c.cfg"), "[experiment]\nbackend = svm\n");
  CHECK_THROWS_WITH_AS(LoadExperimentConfig(dir.Path("c.cfg")),
                       Contains("svm"), ConfigError);
}

TEST_CASE("warp grid values parse and validate") {
  CHECK(ParseAlphaGrid("all") == frontend::WarpGrid());
  CHECK(ParseAlphaGrid("0.92 1.00") == std::vector<int>{92, 100});
  CHECK(ParseAlphaGrid("1.04 0.96") == std::vector<int>{96, 104});  // sorted
  CHECK(ParseAlpha("0.80") == 80);
  CHECK(ParseAlpha("1.2") == 120);
  CHECK_THROWS_AS(ParseAlpha("0.93"), ConfigError);   // off the 0.02 step
  CHECK_THROWS_AS(ParseAlpha("0.78"), ConfigError);   // below range
  CHECK_THROWS_AS(ParseAlpha("1.22"), ConfigError);   // above range
  CHECK_THROWS_AS(ParseAlpha("abc"), ConfigError);
  CHECK_THROWS_AS(ParseAlphaGrid("1.00 1.00"), ConfigError);  // duplicate
  CHECK_THROWS_AS(ParseAlphaGrid(""), ConfigError);
}

TEST_CASE("config paths resolve against the config file directory") {
  TempDir dir("cfg_paths");
  fs::create_directories(dir.Path("nested"));
  Spew(dir.Path("nested/exp.cfg"),
       "[corpus]\ndir = my_corpus\n[experiment]\nout-dir = my_out\n");
  const ExperimentConfig cfg = LoadExperimentConfig(dir.Path("nested/exp.cfg"));
  CHECK(cfg.corpus_dir == dir.Path("nested/my_corpus"));
  CHECK(cfg.out_dir == dir.Path("nested/my_out"));

  // Unset keys take the documented defaults.
  CHECK(cfg.features == std::vector<std::string>{"mfcc"});
  CHECK(cfg.backend == "gmm-ubm");
  CHECK(cfg.grid == frontend::WarpGrid());
  CHECK(cfg.workers == 1);
  CHECK(cfg.ubm.num_components == 64);
  CHECK(cfg.tv.rank == 100);
}

TEST_CASE("bottleneck projection wider than the tapped layer is rejected") {
  TempDir dir("cfg_pca");
  Spew(dir.Path("a.cfg"),
       "[experiment]\nfeatures = mfcc apc-bn\n[apc-bn]\nhidden = 32\n"
       "[pca]\ndim = 57\n");
  CHECK_THROWS_WITH_AS(LoadExperimentConfig(dir.Path("a.cfg")),
                       Contains("apc-bn hidden"), ConfigError);
  Spew(dir.Path("b.cfg"),
       "[experiment]\nfeatures = mfcc spk-bn\n[spk-bn]\nhidden-width = 16\n"
       "[pca]\ndim = 57\n");
  CHECK_THROWS_AS(LoadExperimentConfig(dir.Path("b.cfg")), ConfigError);
  Spew(dir.Path("c.cfg"),
       "[experiment]\nfeatures = mfcc spk-bn\n[spk-bn]\ntap = 9\n");
  CHECK_THROWS_WITH_AS(LoadExperimentConfig(dir.Path("c.cfg")),
                       Contains("tap"), ConfigError);
}

TEST_CASE("stage caching follows file timestamps") {
  TempDir dir("rebuild");
  const std::string in = dir.Path("in.txt");
  const std::string out = dir.Path("out.txt");
  Spew(in, "x");

  CHECK(NeedsRebuild({out}, {in}));  // output missing

  Spew(out, "y");
  fs::last_write_time(out, fs::last_write_time(in) + std::chrono::seconds(2));
  CHECK_FALSE(NeedsRebuild({out}, {in}));  // output newer

  fs::last_write_time(in, fs::last_write_time(out) + std::chrono::seconds(2));
  CHECK(NeedsRebuild({out}, {in}));  // input newer again

  CHECK_THROWS_WITH_AS(NeedsRebuild({out}, {dir.Path("gone.txt")}),
                       Contains("gone.txt"), DataError);
}

TEST_CASE("corpus synthesis refuses to clobber without force") {
  TempDir dir("synth_force");
  ExperimentConfig cfg = TinyConfig(dir.Path(), {100});
  const auto first = SynthCorpusChecked(cfg.corpus, cfg.corpus_dir, false);
  // 3 speakers x 2 phrases x (2 enroll + 1 test) + 4 x 2 x 2 background.
  CHECK(first.wav_files == 34);
  CHECK(first.background_rows == 16);
  CHECK(first.enroll_rows == 12);
  CHECK(first.test_rows == 6);

  CHECK_THROWS_WITH_AS(SynthCorpusChecked(cfg.corpus, cfg.corpus_dir, false),
                       Contains("--force"), DataError);
  const auto again = SynthCorpusChecked(cfg.corpus, cfg.corpus_dir, true);
  CHECK(again.wav_files == first.wav_files);
}

TEST_CASE("missing corpus points at synth-corpus") {
  TempDir dir("no_corpus");
  CHECK_THROWS_WITH_AS(LoadCorpusData(dir.Path("nowhere")),
                       Contains("synth-corpus"), DataError);
}

TEST_CASE("degenerate grid runs the baseline pipeline") {
  TempDir dir("baseline");
  const ExperimentConfig cfg = FreshExperiment(dir, {100});
  const RunSummary summary = RunExperiment(cfg, false);
  CHECK(summary.ran > 0);
  CHECK(summary.skipped == 0);

  const Layout layout{cfg.out_dir};
  CHECK(fs::exists(layout.UbmFile("mfcc", 100)));
  CHECK(fs::exists(layout.SpeakerModelFile("mfcc", 100, "spk01-ph1")));
  CHECK(fs::exists(layout.ReportFile("mfcc", 100)));
  CHECK(fs::exists(layout.DetFile("mfcc", 100)));

  // Every trial gets exactly one score line.
  const eval::ScoreSet scores =
      eval::ReadScoreFile(layout.ScoreFile("mfcc", 100), "t");
  const CorpusData data = LoadCorpusData(cfg.corpus_dir);
  CHECK(scores.entries.size() == data.trials.trials.size());

  // Fusing a one-system grid is the identity, down to the bytes.
  CHECK(SlurpBytes(layout.FusedScoreFile("mfcc")) ==
        SlurpBytes(layout.ScoreFile("mfcc", 100)));

  std::ifstream report(layout.ReportFile("mfcc", 100));
  std::string text((std::istreambuf_iterator<char>(report)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("avg.eer = ") != std::string::npos);
  CHECK(text.find("non-target type") != std::string::npos);
}

TEST_CASE("reruns skip every stage and rebuild only what was removed") {
  TempDir dir("caching");
  const ExperimentConfig cfg = FreshExperiment(dir, {96, 100, 104});
  const Layout layout{cfg.out_dir};

  const RunSummary first = RunExperiment(cfg, false);
  CHECK(first.ran == 1 + 3 * 4 + 2);  // extract + 3x(ubm,enroll,score,eval)
                                      // + fuse + fused eval
  const RunSummary rerun = RunExperiment(cfg, false);
  CHECK(rerun.ran == 0);
  CHECK(rerun.skipped == first.ran);

  // Wiping one warp factor rebuilds just its pipeline plus the fusion.
  const auto untouched_before =
      fs::last_write_time(layout.ScoreFile("mfcc", 96));
  fs::remove_all(layout.AlphaRoot("mfcc", 104));
  const RunSummary partial = RunExperiment(cfg, false);
  CHECK(partial.ran == 1 + 4 + 2);
  CHECK(fs::exists(layout.ScoreFile("mfcc", 104)));
  CHECK(fs::last_write_time(layout.ScoreFile("mfcc", 96)) ==
        untouched_before);
}

TEST_CASE("fused scores are the per-trial mean over the grid") {
  TempDir dir("fusion");
  const ExperimentConfig cfg = FreshExperiment(dir, {96, 100, 104});
  RunExperiment(cfg, false);
  const Layout layout{cfg.out_dir};

  std::vector<std::map<std::string, double>> per_alpha;
  for (int h : cfg.grid)
    per_alpha.push_back(
        ScoreByKey(eval::ReadScoreFile(layout.ScoreFile("mfcc", h), "s")));
  const auto fused =
      ScoreByKey(eval::ReadScoreFile(layout.FusedScoreFile("mfcc"), "f"));

  REQUIRE(fused.size() == per_alpha[0].size());
  for (const auto &[key, value] : fused) {
    const double mean =
        (per_alpha[0].at(key) + per_alpha[1].at(key) + per_alpha[2].at(key)) /
        3.0;
    CHECK(value == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("single and multi worker runs are byte-identical") {
  TempDir dir("determinism");
  ExperimentConfig cfg = FreshExperiment(dir, {96, 100, 104});

  cfg.out_dir = dir.Path("out_a");
  RunExperiment(cfg, false);
  cfg.out_dir = dir.Path("out_b");
  RunExperiment(cfg, false);
  cfg.out_dir = dir.Path("out_c");
  cfg.workers = 3;
  RunExperiment(cfg, false);

  const Layout a{dir.Path("out_a")}, b{dir.Path("out_b")},
      c{dir.Path("out_c")};
  for (int h : cfg.grid) {
    const auto bytes = SlurpBytes(a.ScoreFile("mfcc", h));
    CHECK(bytes == SlurpBytes(b.ScoreFile("mfcc", h)));
    CHECK(bytes == SlurpBytes(c.ScoreFile("mfcc", h)));
    CHECK(SlurpBytes(a.ReportFile("mfcc", h)) ==
          SlurpBytes(b.ReportFile("mfcc", h)));
  }
  CHECK(SlurpBytes(a.FusedScoreFile("mfcc")) ==
        SlurpBytes(b.FusedScoreFile("mfcc")));
  CHECK(SlurpBytes(a.FusedScoreFile("mfcc")) ==
        SlurpBytes(c.FusedScoreFile("mfcc")));
  CHECK(SlurpBytes(a.FusedReportFile("mfcc")) ==
        SlurpBytes(c.FusedReportFile("mfcc")));
}

TEST_CASE("ivector backend runs end to end") {
  TempDir dir("ivec_run");
  ExperimentConfig cfg = FreshExperiment(dir, {100});
  cfg.backend = "ivector";
  cfg.tv.rank = 4;
  cfg.tv.iterations = 3;
  cfg.plda.iterations = 3;

  const RunSummary summary = RunExperiment(cfg, false);
  CHECK(summary.ran > 0);
  const Layout layout{cfg.out_dir};
  CHECK(fs::exists(layout.TvFile("mfcc", 100)));
  CHECK(fs::exists(layout.SnormFile("mfcc", 100)));
  CHECK(fs::exists(layout.PldaFile("mfcc", 100)));
  CHECK(fs::exists(layout.EnrollVecFile("mfcc", 100)));

  const eval::ScoreSet scores =
      eval::ReadScoreFile(layout.ScoreFile("mfcc", 100), "t");
  CHECK(scores.entries.size() == 36);

  const RunSummary rerun = RunExperiment(cfg, false);
  CHECK(rerun.ran == 0);
}

TEST_CASE("the binary maps failures onto the documented exit codes") {
  TempDir dir("tool");
  CHECK(RunTool("--help > /dev/null") == 0);
  CHECK(RunTool("no-such-command 2> /dev/null") == 2);
  CHECK(RunTool("run 2> /dev/null") == 2);  // --config missing
  CHECK(RunTool("run --config " + dir.Path("absent.cfg") +
                " 2> /dev/null") == 3);
  Spew(dir.Path("bad.cfg"), "[experiment]\nworkers = -1\n");
  CHECK(RunTool("run --config " + dir.Path("bad.cfg") + " 2> /dev/null") ==
        2);
  CHECK(RunTool("evaluate --scores " + dir.Path("none.txt") +
                " 2> /dev/null") == 3);
}
