// vsv/corpus/generate.hpp

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

#ifndef VSV_CORPUS_GENERATE_HPP_
#define VSV_CORPUS_GENERATE_HPP_

#include <cstdint>
#include <string>

#include "vsv/corpus/trials.hpp"

namespace vsv {
namespace corpus {

// Knobs for a full synthetic text-dependent corpus.  Target speakers appear
// in the enrollment and test partitions; background speakers only in the
// background partition used for UBM (and related) training.  Session
// variability (pitch, articulation and tempo drift between recordings of the
// same speaker-phrase pair) is what keeps the verification task from being
// trivially separable.
struct CorpusConfig {
  int num_speakers = 20;
  int num_background_speakers = 20;
  int num_phrases = 5;
  int enroll_sessions = 3;
  int test_sessions = 2;
  int background_sessions = 3;
  int sample_rate = 16000;

  double vtl_low = 0.90, vtl_high = 1.10;   // per-speaker vocal tract scale
  double f0_low = 95.0, f0_high = 240.0;    // per-speaker mean pitch, Hz
  double speaker_formant_sd = 0.03;         // per-speaker articulation color

  double session_f0_sd = 0.05;      // per-session pitch drift (fraction)
  double session_formant_sd = 0.02; // per-session articulation drift
  double session_tempo_sd = 0.06;   // per-session speaking-rate drift

  double noise_floor_db = -35.0;
  std::uint64_t seed = 1;

  void Validate() const;
};

// File layout under a corpus root.
struct CorpusLayout {
  std::string root;

  explicit CorpusLayout(std::string r) : root(std::move(r)) {}
  std::string WavDir() const { return root + "/wav"; }
  std::string BackgroundManifest() const { return root + "/background.lst"; }
  std::string EnrollManifest() const { return root + "/enroll.lst"; }
  std::string TestManifest() const { return root + "/test.lst"; }
  std::string TrialList() const { return root + "/trials.lst"; }
};

struct CorpusSummary {
  std::int64_t wav_files = 0;
  std::int64_t background_rows = 0;
  std::int64_t enroll_rows = 0;
  std::int64_t test_rows = 0;
  std::array<std::int64_t, kNumTrialTypes> trial_counts{};
};

// Generates audio, the three partition manifests and the trial list under
// out_dir.  Fully deterministic in the config (including its seed).
CorpusSummary SynthCorpus(const CorpusConfig &config,
                          const std::string &out_dir);

}  // namespace corpus
}  // namespace vsv

#endif  // VSV_CORPUS_GENERATE_HPP_
