// corpus/generate.cpp

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

#include "vsv/corpus/generate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "vsv/core/common.hpp"
#include "vsv/core/rng.hpp"
#include "vsv/corpus/synth.hpp"

namespace vsv {
namespace corpus {

namespace {

double Clamp(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

std::string Num2(int i) {
  return (i < 10 ? "0" : "") + std::to_string(i);
}

// Per-speaker voice: a SpeakerSpec plus a multiplicative articulation color
// applied to every phrase's formants.
struct Voice {
  SpeakerSpec spec;
  std::array<double, 3> formant_color = {1.0, 1.0, 1.0};
};

Voice SampleVoice(const CorpusConfig &cfg, const std::string &speaker_id) {
  Rng rng(Rng::Mix(cfg.seed, Rng::HashBytes("voice:" + speaker_id)));
  Voice v;
  v.spec.vtl_scale = rng.Uniform(cfg.vtl_low, cfg.vtl_high);
  v.spec.f0_mean = rng.Uniform(cfg.f0_low, cfg.f0_high);
  v.spec.f0_jitter = 0.02;
  v.spec.noise_floor_db = cfg.noise_floor_db;
  v.spec.formant_bandwidths = {rng.Uniform(70.0, 110.0),
                               rng.Uniform(90.0, 140.0),
                               rng.Uniform(120.0, 180.0)};
  for (auto &c : v.formant_color)
    c = Clamp(1.0 + cfg.speaker_formant_sd * rng.Normal(), 0.92, 1.08);
  return v;
}

PhraseTemplate SamplePhrase(const CorpusConfig &cfg, int phrase_idx) {
  std::string phrase_id = "ph" + std::to_string(phrase_idx + 1);
  Rng rng(Rng::Mix(cfg.seed, Rng::HashBytes("phrase:" + phrase_id)));

  PhraseTemplate tpl;
  tpl.phrase_id = phrase_id;
  int n_seg = 4 + static_cast<int>(rng.UniformInt(3));
  int n_voiced = 0;
  for (int s = 0; s < n_seg; ++s) {
    PhraseSegment seg;
    double f1 = rng.Uniform(300.0, 850.0);
    double f2 = f1 + rng.Uniform(300.0, 1300.0);
    double f3 = f2 + rng.Uniform(400.0, 1200.0);
    seg.formants_hz = {f1, f2, std::min(f3, 3400.0)};
    seg.duration_ms = rng.Uniform(250.0, 550.0);
    seg.voiced = (s == 0) || rng.Uniform() < 0.7;
    if (seg.voiced) ++n_voiced;
    tpl.segments.push_back(seg);
  }
  // Phrases need enough voiced material for stable spectral statistics.
  for (std::size_t s = tpl.segments.size(); n_voiced < 2 && s-- > 0;) {
    if (!tpl.segments[s].voiced) {
      tpl.segments[s].voiced = true;
      ++n_voiced;
    }
  }
  // Rescale to a target total length inside the allowed range.
  double target_ms = rng.Uniform(1800.0, 2400.0);
  double scale = target_ms / tpl.TotalMs();
  for (auto &seg : tpl.segments) seg.duration_ms *= scale;
  return tpl;
}

}  // namespace

void CorpusConfig::Validate() const {
  if (num_speakers < 2) throw ConfigError("corpus: need at least 2 speakers");
  if (num_background_speakers < 0)
    throw ConfigError("corpus: negative background speaker count");
  if (num_phrases < 2) throw ConfigError("corpus: need at least 2 phrases");
  if (enroll_sessions < 1 || test_sessions < 1)
    throw ConfigError("corpus: need at least 1 enroll and 1 test session");
  if (background_sessions < 1 && num_background_speakers > 0)
    throw ConfigError("corpus: need at least 1 background session");
  if (sample_rate < 8000) throw ConfigError("corpus: sample rate below 8 kHz");
  if (!(vtl_low >= 0.8 && vtl_high <= 1.2 && vtl_low <= vtl_high))
    throw ConfigError("corpus: vtl range must lie inside [0.8, 1.2]");
  if (!(f0_low >= 60.0 && f0_high <= 400.0 && f0_low <= f0_high))
    throw ConfigError("corpus: f0 range must lie inside [60, 400] Hz");
}

CorpusSummary SynthCorpus(const CorpusConfig &config,
                          const std::string &out_dir) {
  config.Validate();
  CorpusLayout layout(out_dir);
  std::filesystem::create_directories(layout.WavDir());

  std::vector<PhraseTemplate> phrases;
  for (int p = 0; p < config.num_phrases; ++p)
    phrases.push_back(SamplePhrase(config, p));

  CorpusSummary summary;
  std::vector<ManifestEntry> background, enroll, test;

  // `partition` distinguishes session roles; `sessions` counts recordings of
  // each speaker-phrase pair in that partition.
  auto emit_speaker = [&](const std::string &speaker_id, const Voice &voice,
                          const std::string &session_prefix, int sessions,
                          std::vector<ManifestEntry> *manifest) {
    for (int p = 0; p < config.num_phrases; ++p) {
      for (int s = 0; s < sessions; ++s) {
        std::string session_id = session_prefix + std::to_string(s + 1);
        std::string utt_id =
            speaker_id + "_" + phrases[p].phrase_id + "_" + session_id;
        Rng rng(Rng::Mix(config.seed, Rng::HashBytes("utt:" + utt_id)));

        // Session-level drift: pitch, articulation and tempo all move a
        // little between recordings.  Clamps keep the perturbed template
        // within its validity envelope.
        SpeakerSpec spec = voice.spec;
        spec.f0_mean *=
            Clamp(1.0 + config.session_f0_sd * rng.Normal(), 0.85, 1.15);
        spec.f0_mean = Clamp(spec.f0_mean, 60.0, 400.0);

        PhraseTemplate tpl = phrases[p];
        double tempo =
            Clamp(1.0 + config.session_tempo_sd * rng.Normal(), 0.88, 1.12);
        for (auto &seg : tpl.segments) {
          seg.duration_ms *= tempo;
          double prev = 0.0;
          for (int f = 0; f < 3; ++f) {
            double drift = Clamp(
                1.0 + config.session_formant_sd * rng.Normal(), 0.94, 1.06);
            double value = seg.formants_hz[f] * voice.formant_color[f] * drift;
            // Keep formants strictly increasing after perturbation.
            value = std::max(value, prev + 50.0);
            seg.formants_hz[f] = value;
            prev = value;
          }
        }

        Utterance utt =
            SynthUtterance(spec, tpl, rng.NextU64(), config.sample_rate);
        std::string rel_path = "wav/" + utt_id + ".wav";
        WriteWav(out_dir + "/" + rel_path, utt.samples, utt.sample_rate);
        ++summary.wav_files;

        manifest->push_back(
            ManifestEntry{utt_id, speaker_id, phrases[p].phrase_id, rel_path});
      }
    }
  };

  for (int i = 0; i < config.num_background_speakers; ++i) {
    std::string speaker_id = "bg" + Num2(i + 1);
    emit_speaker(speaker_id, SampleVoice(config, speaker_id), "s",
                 config.background_sessions, &background);
  }
  for (int i = 0; i < config.num_speakers; ++i) {
    std::string speaker_id = "spk" + Num2(i + 1);
    Voice voice = SampleVoice(config, speaker_id);
    emit_speaker(speaker_id, voice, "e", config.enroll_sessions, &enroll);
    emit_speaker(speaker_id, voice, "v", config.test_sessions, &test);
  }

  if (!background.empty())
    WriteManifest(layout.BackgroundManifest(), background);
  WriteManifest(layout.EnrollManifest(), enroll);
  WriteManifest(layout.TestManifest(), test);

  TrialSet trials = BuildTrials(enroll, test);
  WriteTrials(layout.TrialList(), trials);

  summary.background_rows = static_cast<std::int64_t>(background.size());
  summary.enroll_rows = static_cast<std::int64_t>(enroll.size());
  summary.test_rows = static_cast<std::int64_t>(test.size());
  summary.trial_counts = trials.CountByType();
  return summary;
}

}  // namespace corpus
}  // namespace vsv
