// vsv/eval/scores.hpp

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

#ifndef VSV_EVAL_SCORES_HPP_
#define VSV_EVAL_SCORES_HPP_

#include <string>
#include <vector>

#include "vsv/corpus/trials.hpp"

namespace vsv {
namespace eval {

// One scored trial.  The (model_id, test_id) pair is the trial key; score
// sets from different systems are aligned by key, never by row position.
struct TrialScore {
  std::string model_id;
  std::string test_id;
  corpus::TrialType type = corpus::TrialType::kGenuine;
  double score = 0.0;
};

struct ScoreSet {
  std::string system_id;
  std::vector<TrialScore> entries;
};

// Score files are text, one line `model-id test-id trial-type score`, with
// scores printed to 17 significant digits so a write/read round trip is
// value-preserving.
void WriteScoreFile(const std::string &path, const ScoreSet &set);
ScoreSet ReadScoreFile(const std::string &path, const std::string &system_id);

// Equal-weight fusion: per-trial arithmetic mean over the input systems,
// aligned by trial key.  The output keeps the first system's entry order and
// is labeled "fused".  Duplicate keys within a system, key sets that differ
// between systems, or trial types that disagree for the same key are data
// errors naming the offending keys.
ScoreSet FuseScores(const std::vector<ScoreSet> &systems);

}  // namespace eval
}  // namespace vsv

#endif  // VSV_EVAL_SCORES_HPP_
