// vsv/corpus/wav.hpp

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

#ifndef VSV_CORPUS_WAV_HPP_
#define VSV_CORPUS_WAV_HPP_

#include <string>
#include <vector>

namespace vsv {

// One recording.  Samples are mono floats in [-1, 1]; the id fields tie the
// audio back to its corpus record and must be non-empty on anything that
// travels through a manifest.
struct Utterance {
  std::vector<double> samples;
  int sample_rate = 16000;
  std::string speaker_id;
  std::string phrase_id;
  std::string session_id;

  std::string Id() const {
    return speaker_id + "_" + phrase_id + "_" + session_id;
  }
  double DurationSeconds() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

namespace corpus {

// Reads a RIFF/WAVE file.  Only 16-bit PCM mono is accepted; anything else
// (float encodings, multi-channel, truncated or zero-length files) raises
// DataError.  int16 values are scaled by 1/32768.
Utterance ReadWav(const std::string &path);

// Writes 16-bit PCM mono.  Samples are clipped to [-1, 1] first.
void WriteWav(const std::string &path, const std::vector<double> &samples,
              int sample_rate);

}  // namespace corpus
}  // namespace vsv

#endif  // VSV_CORPUS_WAV_HPP_
