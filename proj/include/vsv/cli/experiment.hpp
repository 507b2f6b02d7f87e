// vsv/cli/experiment.hpp

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

#ifndef VSV_CLI_EXPERIMENT_HPP_
#define VSV_CLI_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vsv/cli/config.hpp"
#include "vsv/corpus/generate.hpp"
#include "vsv/corpus/trials.hpp"

namespace vsv {
namespace cli {

// Artifact tree under the experiment output directory:
//   <out>/<feature>/a<hh>/features/<partition>/<utt>.vsvf
//   <out>/<feature>/a<hh>/models/{net.vsvn, pca.vsvn, ubm.vsvg, tv.vsvt,
//                                 snorm.vsvs, plda.vsvp, enroll.vsvi,
//                                 speakers/<model>.vsvg}
//   <out>/<feature>/a<hh>/scores/{scores.txt, report.txt, det.csv}
//   <out>/<feature>/fused/{scores.txt, report.txt, det.csv}
//   <out>/fused/{scores.txt, report.txt, det.csv}        (across features)
// Warp factors are encoded as integer hundredths, so a092 is alpha 0.92.
struct Layout {
  std::string out_dir;

  static std::string AlphaName(int hundredths);

  std::string AlphaRoot(const std::string &feature, int h) const;
  std::string FeatureDir(const std::string &feature, int h,
                         const std::string &partition) const;
  std::string ModelsDir(const std::string &feature, int h) const;
  std::string ScoresDir(const std::string &feature, int h) const;

  std::string NetFile(const std::string &feature, int h) const;
  std::string PcaFile(const std::string &feature, int h) const;
  std::string UbmFile(const std::string &feature, int h) const;
  std::string TvFile(const std::string &feature, int h) const;
  std::string SnormFile(const std::string &feature, int h) const;
  std::string PldaFile(const std::string &feature, int h) const;
  std::string EnrollVecFile(const std::string &feature, int h) const;
  std::string SpeakerModelFile(const std::string &feature, int h,
                               const std::string &model_id) const;

  std::string ScoreFile(const std::string &feature, int h) const;
  std::string ReportFile(const std::string &feature, int h) const;
  std::string DetFile(const std::string &feature, int h) const;

  std::string FusedDir(const std::string &feature) const;
  std::string FusedScoreFile(const std::string &feature) const;
  std::string FusedReportFile(const std::string &feature) const;
  std::string FusedDetFile(const std::string &feature) const;

  std::string CrossDir() const;
  std::string CrossScoreFile() const;
  std::string CrossReportFile() const;
  std::string CrossDetFile() const;
};

// True when any output is missing or older than the newest input.  Missing
// inputs raise DataError naming the path, since a stage can never succeed
// without them.
bool NeedsRebuild(const std::vector<std::string> &outputs,
                  const std::vector<std::string> &inputs);

// The three corpus partitions plus the trial list, loaded once per run and
// shared read-only across workers.
struct CorpusData {
  corpus::CorpusLayout layout;
  std::vector<corpus::ManifestEntry> background, enroll, test;
  corpus::TrialSet trials;
};

CorpusData LoadCorpusData(const std::string &corpus_dir);

// Every stage returns true when it ran and false when its outputs were
// already newer than its inputs (skipped).  `force` disables the check.
// The mfcc extraction stage covers the whole grid at once so each
// utterance's spectrogram is computed once; it only rewrites stale files,
// leaving fresh warp factors untouched.
bool StageExtractMfcc(const ExperimentConfig &cfg, const Layout &layout,
                      const CorpusData &data, const std::vector<int> &grid,
                      bool force, int workers);
bool StageTrainSpkBn(const ExperimentConfig &cfg, const Layout &layout,
                     const CorpusData &data, int h, bool force);
bool StageTrainApc(const ExperimentConfig &cfg, const Layout &layout,
                   const CorpusData &data, int h, bool force);
bool StageFitPca(const ExperimentConfig &cfg, const Layout &layout,
                 const CorpusData &data, const std::string &feature, int h,
                 bool force);
bool StageExtractBn(const ExperimentConfig &cfg, const Layout &layout,
                    const CorpusData &data, const std::string &feature, int h,
                    bool force);
bool StageTrainUbm(const ExperimentConfig &cfg, const Layout &layout,
                   const CorpusData &data, const std::string &feature, int h,
                   bool force);
bool StageTrainTv(const ExperimentConfig &cfg, const Layout &layout,
                  const CorpusData &data, const std::string &feature, int h,
                  bool force);
bool StageTrainPlda(const ExperimentConfig &cfg, const Layout &layout,
                    const CorpusData &data, const std::string &feature, int h,
                    bool force);
bool StageEnroll(const ExperimentConfig &cfg, const Layout &layout,
                 const CorpusData &data, const std::string &feature, int h,
                 bool force);
bool StageScore(const ExperimentConfig &cfg, const Layout &layout,
                const CorpusData &data, const std::string &feature, int h,
                bool force);
// Reads one score file and writes its report and DET points next to it.
bool StageEvaluate(const ExperimentConfig &cfg, const std::string &score_path,
                   const std::string &report_path, const std::string &det_path,
                   const std::string &system_id, bool force);
// Mean-fuses the grid's score files for one feature.
bool StageFuseFeature(const ExperimentConfig &cfg, const Layout &layout,
                      const std::string &feature, bool force);
// Mean-fuses every (feature, warp factor) system.
bool StageFuseAll(const ExperimentConfig &cfg, const Layout &layout,
                  bool force);

struct RunSummary {
  int ran = 0;
  int skipped = 0;
  // Human-readable report locations, one per evaluated system.
  std::vector<std::string> reports;
};

// The full pipeline: mfcc extraction over the grid, then per-(feature,
// warp factor) training/enrollment/scoring on a work queue of `workers`
// threads, then fusion and evaluation.  Any stage failure aborts the run
// with the failing stage and warp factor prepended to the error.
RunSummary RunExperiment(const ExperimentConfig &cfg, bool force);

// Corpus synthesis with overwrite protection: an existing non-empty corpus
// directory is an error unless force is set.
corpus::CorpusSummary SynthCorpusChecked(const corpus::CorpusConfig &config,
                                         const std::string &out_dir,
                                         bool force);

}  // namespace cli
}  // namespace vsv

#endif  // VSV_CLI_EXPERIMENT_HPP_
