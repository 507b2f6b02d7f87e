// corpus/synth.cpp

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

#include "vsv/corpus/synth.hpp"

#include <cmath>
#include <complex>

#include "vsv/core/common.hpp"
#include "vsv/core/rng.hpp"

namespace vsv {
namespace corpus {

namespace {

// Two-pole resonator with unit gain at its center frequency.  State is kept
// across coefficient updates so segment boundaries do not click.
class Resonator {
 public:
  void Configure(double freq_hz, double bandwidth_hz, int sample_rate) {
    double theta = 2.0 * M_PI * freq_hz / sample_rate;
    double r = std::exp(-M_PI * bandwidth_hz / sample_rate);
    a1_ = 2.0 * r * std::cos(theta);
    a2_ = -r * r;
    // Normalize so |H| = 1 at the pole frequency.
    std::complex<double> w1 = std::polar(1.0, -theta);
    std::complex<double> denom = 1.0 - a1_ * w1 - a2_ * w1 * w1;
    gain_ = std::abs(denom);
  }

  double Step(double x) {
    double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0.0, a2_ = 0.0, gain_ = 1.0;
  double y1_ = 0.0, y2_ = 0.0;
};

}  // namespace

void SpeakerSpec::Validate() const {
  if (!(vtl_scale >= 0.8 && vtl_scale <= 1.2))
    throw DataError("SpeakerSpec: vtl_scale outside [0.8, 1.2]");
  if (!(f0_mean >= 60.0 && f0_mean <= 400.0))
    throw DataError("SpeakerSpec: f0_mean outside [60, 400] Hz");
  if (!(f0_jitter >= 0.0 && f0_jitter < 0.5))
    throw DataError("SpeakerSpec: f0_jitter outside [0, 0.5)");
  if (formant_bandwidths.empty())
    throw DataError("SpeakerSpec: no formant bandwidths");
  for (double b : formant_bandwidths)
    if (!(b > 0.0 && b < 1000.0))
      throw DataError("SpeakerSpec: formant bandwidth outside (0, 1000) Hz");
}

double PhraseTemplate::TotalMs() const {
  double total = 0.0;
  for (const auto &seg : segments) total += seg.duration_ms;
  return total;
}

void PhraseTemplate::Validate() const {
  if (segments.empty()) throw DataError("PhraseTemplate: no segments");
  for (const auto &seg : segments) {
    if (!(seg.duration_ms > 0.0))
      throw DataError("PhraseTemplate: non-positive segment duration");
    double prev = 0.0;
    for (double f : seg.formants_hz) {
      if (!(f > prev))
        throw DataError("PhraseTemplate: formants must be increasing");
      prev = f;
    }
  }
  double total = TotalMs();
  if (!(total >= 1500.0 && total <= 3000.0))
    throw DataError("PhraseTemplate: total duration outside [1.5, 3.0] s");
}

Utterance SynthUtterance(const SpeakerSpec &spec, const PhraseTemplate &phrase,
                         std::uint64_t seed, int sample_rate) {
  spec.Validate();
  phrase.Validate();
  if (sample_rate < 8000) throw DataError("SynthUtterance: bad sample rate");

  Rng rng(seed);
  std::array<Resonator, 3> tract;
  std::vector<double> out;
  out.reserve(
      static_cast<std::size_t>(phrase.TotalMs() / 1000.0 * sample_rate) + 16);

  // Pulse positions carry across segment boundaries so voicing stays
  // periodic through articulation changes.
  double next_pulse = 0.0;
  double carry = 0.0;  // second half of a pulse that crossed the boundary
  double global_pos = 0.0;

  for (const auto &seg : phrase.segments) {
    auto n = static_cast<std::int64_t>(
        std::lround(seg.duration_ms / 1000.0 * sample_rate));
    if (n <= 0) continue;

    for (int f = 0; f < 3; ++f) {
      double bw = spec.formant_bandwidths[std::min(
          static_cast<std::size_t>(f), spec.formant_bandwidths.size() - 1)];
      double freq = seg.formants_hz[static_cast<std::size_t>(f)] /
                    spec.vtl_scale;
      double max_freq = 0.47 * sample_rate;
      if (freq > max_freq) freq = max_freq;
      if (freq < 60.0) freq = 60.0;
      tract[static_cast<std::size_t>(f)].Configure(freq, bw, sample_rate);
    }

    for (std::int64_t i = 0; i < n; ++i, global_pos += 1.0) {
      double src = carry;
      carry = 0.0;
      if (seg.voiced) {
        if (global_pos >= next_pulse) {
          // Two-sample decaying glottal pulse.
          src += 1.0;
          carry = 0.5;
          double period = sample_rate / spec.f0_mean;
          period *= 1.0 + spec.f0_jitter * rng.Normal();
          if (period < 16.0) period = 16.0;
          next_pulse += period;
        }
        src += 0.02 * rng.Normal();  // aspiration
      } else {
        src = 0.3 * rng.Normal();
      }
      double y = src;
      for (auto &res : tract) y = res.Step(y);
      out.push_back(y);
    }
  }

  double peak = 0.0;
  for (double s : out) peak = std::max(peak, std::abs(s));
  if (!(peak > 0.0))
    throw NumericError("SynthUtterance: produced an all-zero signal");

  // Additive noise floor, expressed relative to the current peak, then an
  // exact peak normalization to 0.9.
  double noise_amp = peak * std::pow(10.0, spec.noise_floor_db / 20.0);
  for (double &s : out) s += noise_amp * rng.Normal();
  peak = 0.0;
  for (double s : out) peak = std::max(peak, std::abs(s));
  double scale = 0.9 / peak;
  for (double &s : out) s *= scale;

  Utterance utt;
  utt.samples = std::move(out);
  utt.sample_rate = sample_rate;
  return utt;
}

}  // namespace corpus
}  // namespace vsv
