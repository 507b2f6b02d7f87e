// vsv/corpus/synth.hpp

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

#ifndef VSV_CORPUS_SYNTH_HPP_
#define VSV_CORPUS_SYNTH_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vsv/corpus/wav.hpp"

namespace vsv {
namespace corpus {

// Physical description of a synthetic voice.  vtl_scale divides the formant
// frequencies, so values above 1 model a longer vocal tract (lower
// resonances).
struct SpeakerSpec {
  double vtl_scale = 1.0;      // allowed range [0.8, 1.2]
  double f0_mean = 120.0;      // Hz, allowed range [60, 400]
  double f0_jitter = 0.02;     // per-period fractional deviation
  std::vector<double> formant_bandwidths = {90.0, 110.0, 140.0};  // Hz
  double noise_floor_db = -40.0;  // relative to the signal peak

  void Validate() const;
};

struct PhraseSegment {
  std::array<double, 3> formants_hz = {500.0, 1500.0, 2500.0};
  double duration_ms = 300.0;
  bool voiced = true;
};

// A fixed pass-phrase, described as a sequence of held articulations.
struct PhraseTemplate {
  std::string phrase_id;
  std::vector<PhraseSegment> segments;

  double TotalMs() const;
  void Validate() const;  // total duration must lie in [1500, 3000] ms
};

// Source-filter synthesis: a glottal pulse train (or noise for unvoiced
// segments) driven through a cascade of three resonators placed at
// formant / vtl_scale.  Deterministic in (spec, phrase, seed).  The output
// is peak-normalized to 0.9 after a noise floor is added.  Speaker, phrase
// and session ids are left empty for the caller to fill.
Utterance SynthUtterance(const SpeakerSpec &spec, const PhraseTemplate &phrase,
                         std::uint64_t seed, int sample_rate = 16000);

}  // namespace corpus
}  // namespace vsv

#endif  // VSV_CORPUS_SYNTH_HPP_
