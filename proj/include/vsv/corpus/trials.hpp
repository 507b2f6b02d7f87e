// vsv/corpus/trials.hpp

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

#ifndef VSV_CORPUS_TRIALS_HPP_
#define VSV_CORPUS_TRIALS_HPP_

#include <array>
#include <string>
#include <vector>

#include "vsv/corpus/manifest.hpp"

namespace vsv {
namespace corpus {

// Text-dependent trials fall in a 2x2 grid: does the test speaker match the
// model's speaker, and does the spoken phrase match the model's phrase?
enum class TrialType {
  kGenuine = 0,          // same speaker, same phrase
  kTargetWrong = 1,      // same speaker, different phrase
  kImposterCorrect = 2,  // different speaker, same phrase
  kImposterWrong = 3,    // different speaker, different phrase
};

constexpr int kNumTrialTypes = 4;

const char *TrialTypeName(TrialType type);
TrialType TrialTypeFromName(const std::string &name);
bool IsTarget(TrialType type);  // true only for kGenuine

struct Trial {
  std::string model_id;  // "<speaker>-<phrase>"
  std::string model_speaker;
  std::string model_phrase;
  std::string test_utt_id;
  std::string test_path;
  TrialType type = TrialType::kGenuine;
};

struct TrialSet {
  std::vector<Trial> trials;

  std::array<std::int64_t, kNumTrialTypes> CountByType() const;
};

// Enumerates the full cross of enrollment models (one per speaker-phrase
// pair seen in the enrollment manifest) against every test utterance, and
// labels each trial by the 2x2 grid above.  The same utterance appearing in
// both manifests is an error, as are empty inputs.
TrialSet BuildTrials(const std::vector<ManifestEntry> &enroll,
                     const std::vector<ManifestEntry> &test);

// Trial list rows are `model-id phrase-id test-path trial-type`.  Reading
// needs the test manifest to map paths back to utterance ids.
void WriteTrials(const std::string &path, const TrialSet &set);
TrialSet ReadTrials(const std::string &path,
                    const std::vector<ManifestEntry> &test_manifest);

}  // namespace corpus
}  // namespace vsv

#endif  // VSV_CORPUS_TRIALS_HPP_
