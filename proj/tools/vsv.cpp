// tools/vsv.cpp

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

// Command line driver.  Every subcommand maps onto one pipeline stage (or
// the whole pipeline, for `run`); stages skip work whose outputs are newer
// than the inputs, so invocations compose like make targets.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vsv/cli/config.hpp"
#include "vsv/cli/experiment.hpp"
#include "vsv/core/common.hpp"
#include "vsv/corpus/trials.hpp"
#include "vsv/eval/scores.hpp"

namespace {

using vsv::cli::ExperimentConfig;
using vsv::cli::Layout;

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  int workers = 0;
  bool force = false;
  bool verbose = false;
  CLI::Option *seed_opt = nullptr;
  CLI::Option *workers_opt = nullptr;
};

ExperimentConfig LoadConfig(const GlobalArgs &args) {
  if (args.config_path.empty())
    throw vsv::ConfigError("this subcommand needs --config");
  ExperimentConfig cfg = vsv::cli::LoadExperimentConfig(args.config_path);
  if (args.seed_opt->count() > 0) cfg.seed = args.seed;
  if (args.workers_opt->count() > 0) cfg.workers = args.workers;
  cfg.Validate();
  return cfg;
}

// --alpha narrows a stage to one warp factor; the default is the full grid.
std::vector<int> PickGrid(const ExperimentConfig &cfg,
                          const std::string &alpha) {
  if (alpha.empty()) return cfg.grid;
  return {vsv::cli::ParseAlpha(alpha)};
}

// --feature narrows a stage to one feature type; the default is every
// configured one (bottleneck types only, when the stage needs a network).
std::vector<std::string> PickFeatures(const ExperimentConfig &cfg,
                                      const std::string &feature,
                                      bool bn_only) {
  const std::vector<std::string> known =
      bn_only ? std::vector<std::string>{"spk-bn", "apc-bn"}
              : std::vector<std::string>{"mfcc", "spk-bn", "apc-bn"};
  if (!feature.empty()) {
    for (const auto &k : known)
      if (feature == k) return {feature};
    throw vsv::ConfigError("--feature must be one of mfcc, spk-bn, apc-bn" +
                           std::string(bn_only ? " (bottleneck types only)"
                                               : "") +
                           ", got " + feature);
  }
  std::vector<std::string> picked;
  for (const auto &f : cfg.features)
    if (!bn_only || f != "mfcc") picked.push_back(f);
  if (picked.empty())
    throw vsv::ConfigError("no bottleneck features configured; set "
                           "[experiment] features or pass --feature");
  return picked;
}

void PrintStage(const std::string &stage, const std::string &feature, int h,
                bool ran) {
  std::printf("%-11s %-7s %s: %s\n", stage.c_str(), feature.c_str(),
              Layout::AlphaName(h).c_str(), ran ? "ran" : "up to date");
}

void CatFile(const std::string &path) {
  std::ifstream is(path);
  if (is) std::cout << is.rdbuf();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"text-dependent speaker verification with vocal tract "
               "length perturbed features"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--config", g.config_path, "experiment config file");
  g.seed_opt = app.add_option("--seed", g.seed, "override the config seed");
  g.workers_opt =
      app.add_option("--workers", g.workers, "override the worker count");
  app.add_flag("--force", g.force, "rebuild even when outputs are fresh");
  app.add_flag("-v,--verbose", g.verbose, "print progress details");

  std::string feature, alpha;

  // Fresh per-subcommand option bindings would shadow each other, so the
  // shared `feature`/`alpha` strings are reused; only one subcommand parses.
  auto *synth = app.add_subcommand("synth-corpus",
                                   "generate the synthetic corpus");
  auto *extract = app.add_subcommand(
      "extract", "extract features (mfcc, or a trained bottleneck type)");
  extract->add_option("--feature", feature, "feature type (default mfcc)");
  extract->add_option("--alpha", alpha, "single warp factor, e.g. 0.92");
  auto *train_spkbn = app.add_subcommand(
      "train-spkbn", "train the speaker-discriminant bottleneck network");
  train_spkbn->add_option("--alpha", alpha, "single warp factor");
  auto *train_apc = app.add_subcommand(
      "train-apc", "train the predictive-coding bottleneck network");
  train_apc->add_option("--alpha", alpha, "single warp factor");
  auto *fit_pca =
      app.add_subcommand("fit-pca", "fit the bottleneck output projection");
  fit_pca->add_option("--feature", feature, "spk-bn or apc-bn");
  fit_pca->add_option("--alpha", alpha, "single warp factor");
  auto *train_ubm =
      app.add_subcommand("train-ubm", "train the universal background model");
  train_ubm->add_option("--feature", feature, "feature type");
  train_ubm->add_option("--alpha", alpha, "single warp factor");
  auto *train_tv = app.add_subcommand(
      "train-tv", "train the total variability subspace (ivector backend)");
  train_tv->add_option("--feature", feature, "feature type");
  train_tv->add_option("--alpha", alpha, "single warp factor");
  auto *train_plda = app.add_subcommand(
      "train-plda",
      "fit spherical normalization and PLDA (ivector backend)");
  train_plda->add_option("--feature", feature, "feature type");
  train_plda->add_option("--alpha", alpha, "single warp factor");
  auto *enroll =
      app.add_subcommand("enroll", "build one model per speaker and phrase");
  enroll->add_option("--feature", feature, "feature type");
  enroll->add_option("--alpha", alpha, "single warp factor");
  auto *score = app.add_subcommand("score", "score every trial");
  score->add_option("--feature", feature, "feature type");
  score->add_option("--alpha", alpha, "single warp factor");

  std::string fuse_out;
  std::vector<std::string> fuse_inputs;
  auto *fuse =
      app.add_subcommand("fuse", "mean-fuse score files over aligned trials");
  fuse->add_option("-o,--out", fuse_out, "fused score file")->required();
  fuse->add_option("inputs", fuse_inputs, "score files to fuse")
      ->required()
      ->expected(-1);

  std::string eval_scores, eval_report, eval_det, eval_system;
  auto *evaluate = app.add_subcommand(
      "evaluate", "compute EER and minDCF per non-target type");
  evaluate->add_option("--scores", eval_scores, "score file")->required();
  evaluate->add_option("--report", eval_report,
                       "report path (default: next to the score file)");
  evaluate->add_option("--det", eval_det,
                       "DET curve csv (default: next to the score file)");
  evaluate->add_option("--system", eval_system,
                       "system label in the report");

  auto *run = app.add_subcommand("run", "run the whole experiment pipeline");

  try {
    app.parse(argc, argv);

    vsv::logging::SetVerbose(g.verbose);

    if (*synth) {
      const ExperimentConfig cfg = LoadConfig(g);
      const auto s =
          vsv::cli::SynthCorpusChecked(cfg.corpus, cfg.corpus_dir, g.force);
      std::printf("corpus %s: %lld wav files\n", cfg.corpus_dir.c_str(),
                  static_cast<long long>(s.wav_files));
      std::printf("  background %lld, enroll %lld, test %lld utterances\n",
                  static_cast<long long>(s.background_rows),
                  static_cast<long long>(s.enroll_rows),
                  static_cast<long long>(s.test_rows));
      for (int t = 0; t < vsv::corpus::kNumTrialTypes; ++t)
        std::printf("  %-16s %lld trials\n",
                    vsv::corpus::TrialTypeName(
                        static_cast<vsv::corpus::TrialType>(t)),
                    static_cast<long long>(s.trial_counts[t]));
      return 0;
    }

    if (*fuse) {
      std::vector<vsv::eval::ScoreSet> systems;
      systems.reserve(fuse_inputs.size());
      for (const auto &path : fuse_inputs)
        systems.push_back(vsv::eval::ReadScoreFile(path, path));
      std::filesystem::create_directories(
          std::filesystem::path(fuse_out).parent_path());
      vsv::eval::WriteScoreFile(fuse_out, vsv::eval::FuseScores(systems));
      std::printf("fused %zu systems into %s\n", systems.size(),
                  fuse_out.c_str());
      return 0;
    }

    if (*evaluate) {
      // Works without a config; [dcf] overrides apply when one is given.
      ExperimentConfig cfg;
      if (!g.config_path.empty()) cfg = LoadConfig(g);
      const std::filesystem::path scores_path(eval_scores);
      if (eval_report.empty())
        eval_report = (scores_path.parent_path() / "report.txt").string();
      if (eval_det.empty())
        eval_det = (scores_path.parent_path() / "det.csv").string();
      if (eval_system.empty()) eval_system = scores_path.stem().string();
      vsv::cli::StageEvaluate(cfg, eval_scores, eval_report, eval_det,
                              eval_system, g.force);
      CatFile(eval_report);
      return 0;
    }

    if (*run) {
      const ExperimentConfig cfg = LoadConfig(g);
      const auto summary = vsv::cli::RunExperiment(cfg, g.force);
      std::printf("%d stages ran, %d up to date\n", summary.ran,
                  summary.skipped);
      for (const auto &path : summary.reports)
        std::printf("report: %s\n", path.c_str());
      const Layout layout{cfg.out_dir};
      for (const auto &f : cfg.features) {
        std::printf("\n== %s, all warp factors fused ==\n", f.c_str());
        CatFile(layout.FusedReportFile(f));
      }
      if (cfg.features.size() > 1) {
        std::printf("\n== all features fused ==\n");
        CatFile(layout.CrossReportFile());
      }
      return 0;
    }

    // The remaining subcommands are per-(feature, warp factor) stages.
    const ExperimentConfig cfg = LoadConfig(g);
    const Layout layout{cfg.out_dir};
    const vsv::cli::CorpusData data = vsv::cli::LoadCorpusData(cfg.corpus_dir);
    const std::vector<int> grid = PickGrid(cfg, alpha);

    if (*extract) {
      const std::string kind = feature.empty() ? "mfcc" : feature;
      if (kind == "mfcc") {
        const bool ran = vsv::cli::StageExtractMfcc(cfg, layout, data, grid,
                                                    g.force, cfg.workers);
        std::printf("extract     mfcc    %zu warp factors: %s\n", grid.size(),
                    ran ? "ran" : "up to date");
      } else {
        for (const auto &f : PickFeatures(cfg, kind, true))
          for (int h : grid)
            PrintStage("extract", f, h,
                       vsv::cli::StageExtractBn(cfg, layout, data, f, h,
                                                g.force));
      }
      return 0;
    }
    if (*train_spkbn) {
      for (int h : grid)
        PrintStage("train-spkbn", "spk-bn", h,
                   vsv::cli::StageTrainSpkBn(cfg, layout, data, h, g.force));
      return 0;
    }
    if (*train_apc) {
      for (int h : grid)
        PrintStage("train-apc", "apc-bn", h,
                   vsv::cli::StageTrainApc(cfg, layout, data, h, g.force));
      return 0;
    }
    if (*fit_pca) {
      for (const auto &f : PickFeatures(cfg, feature, true))
        for (int h : grid)
          PrintStage("fit-pca", f, h,
                     vsv::cli::StageFitPca(cfg, layout, data, f, h, g.force));
      return 0;
    }
    if (*train_ubm) {
      for (const auto &f : PickFeatures(cfg, feature, false))
        for (int h : grid)
          PrintStage("train-ubm", f, h,
                     vsv::cli::StageTrainUbm(cfg, layout, data, f, h,
                                             g.force));
      return 0;
    }
    if (*train_tv) {
      for (const auto &f : PickFeatures(cfg, feature, false))
        for (int h : grid)
          PrintStage("train-tv", f, h,
                     vsv::cli::StageTrainTv(cfg, layout, data, f, h,
                                            g.force));
      return 0;
    }
    if (*train_plda) {
      for (const auto &f : PickFeatures(cfg, feature, false))
        for (int h : grid)
          PrintStage("train-plda", f, h,
                     vsv::cli::StageTrainPlda(cfg, layout, data, f, h,
                                              g.force));
      return 0;
    }
    if (*enroll) {
      for (const auto &f : PickFeatures(cfg, feature, false))
        for (int h : grid)
          PrintStage("enroll", f, h,
                     vsv::cli::StageEnroll(cfg, layout, data, f, h, g.force));
      return 0;
    }
    if (*score) {
      for (const auto &f : PickFeatures(cfg, feature, false))
        for (int h : grid)
          PrintStage("score", f, h,
                     vsv::cli::StageScore(cfg, layout, data, f, h, g.force));
      return 0;
    }
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const vsv::Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception &e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
