// tests/test_corpus.cpp

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

#include <cmath>
#include <cstdint>
#include <cstring>

#include "test_util.hpp"
#include "vsv/core/common.hpp"
#include "vsv/corpus/generate.hpp"
#include "vsv/corpus/manifest.hpp"
#include "vsv/corpus/synth.hpp"
#include "vsv/corpus/trials.hpp"
#include "vsv/corpus/wav.hpp"

using namespace vsv;
using namespace vsv::corpus;
using vsv_test::TempDir;

namespace {

// Builds a minimal PCM16 WAV byte stream by hand so the reader is tested
// independently of the writer.
std::vector<char> MakeWavBytes(const std::vector<std::int16_t> &samples,
                               std::uint32_t sample_rate = 16000,
                               std::uint16_t channels = 1,
                               std::uint16_t format = 1,
                               std::uint16_t bits = 16) {
  std::vector<char> b;
  auto push_bytes = [&b](const void *p, std::size_t n) {
    const char *c = static_cast<const char *>(p);
    b.insert(b.end(), c, c + n);
  };
  auto push_u32 = [&](std::uint32_t v) { push_bytes(&v, 4); };
  auto push_u16 = [&](std::uint16_t v) { push_bytes(&v, 2); };

  std::uint32_t data_bytes =
      static_cast<std::uint32_t>(samples.size() * sizeof(std::int16_t));
  push_bytes("RIFF", 4);
  push_u32(36 + data_bytes);
  push_bytes("WAVE", 4);
  push_bytes("fmt ", 4);
  push_u32(16);
  push_u16(format);
  push_u16(channels);
  push_u32(sample_rate);
  push_u32(sample_rate * channels * bits / 8);
  push_u16(static_cast<std::uint16_t>(channels * bits / 8));
  push_u16(bits);
  push_bytes("data", 4);
  push_u32(data_bytes);
  push_bytes(samples.data(), data_bytes);
  return b;
}

// O(n log n) is not needed here; a plain DFT keeps the oracle independent of
// any library FFT.
double SpectralCentroid(const std::vector<double> &x, std::size_t begin,
                        std::size_t count, int sample_rate) {
  std::size_t n = count;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double angle = -2.0 * M_PI * static_cast<double>(k * i) / n;
      re += x[begin + i] * std::cos(angle);
      im += x[begin + i] * std::sin(angle);
    }
    double power = re * re + im * im;
    double freq = static_cast<double>(k) * sample_rate / n;
    num += freq * power;
    den += power;
  }
  return num / den;
}

PhraseTemplate OneSegmentPhrase(double f1, double f2, double f3,
                                double duration_ms = 2000.0) {
  PhraseTemplate tpl;
  tpl.phrase_id = "ph1";
  PhraseSegment seg;
  seg.formants_hz = {f1, f2, f3};
  seg.duration_ms = duration_ms;
  seg.voiced = true;
  tpl.segments = {seg};
  return tpl;
}

}  // namespace

TEST_CASE("wav reader scales int16 to [-1, 1]") {
  TempDir tmp("wav");
  std::string path = tmp.Path("a.wav");
  vsv_test::SpewBytes(path, MakeWavBytes({0, 16384, -32768, 32767}));
  Utterance utt = ReadWav(path);
  REQUIRE(utt.samples.size() == 4);
  CHECK(utt.sample_rate == 16000);
  CHECK(utt.samples[0] == doctest::Approx(0.0));
  CHECK(utt.samples[1] == doctest::Approx(0.5));
  CHECK(utt.samples[2] == doctest::Approx(-1.0));
  CHECK(utt.samples[3] == doctest::Approx(32767.0 / 32768.0));
}

TEST_CASE("wav reader handles a full second of silence") {
  TempDir tmp("wav");
  std::string path = tmp.Path("silence.wav");
  vsv_test::SpewBytes(path,
                      MakeWavBytes(std::vector<std::int16_t>(16000, 0)));
  Utterance utt = ReadWav(path);
  CHECK(utt.samples.size() == 16000);
  for (double s : utt.samples) REQUIRE(s == 0.0);
}

TEST_CASE("wav reader rejects unsupported and malformed files") {
  TempDir tmp("wav");

  SUBCASE("stereo") {
    std::string path = tmp.Path("stereo.wav");
    vsv_test::SpewBytes(path, MakeWavBytes({0, 0, 0, 0}, 16000, 2));
    CHECK_THROWS_AS(ReadWav(path), DataError);
  }
  SUBCASE("ieee float format code") {
    std::string path = tmp.Path("float.wav");
    vsv_test::SpewBytes(path, MakeWavBytes({0, 0}, 16000, 1, 3));
    CHECK_THROWS_AS(ReadWav(path), DataError);
  }
  SUBCASE("8 bit depth") {
    std::string path = tmp.Path("bits.wav");
    vsv_test::SpewBytes(path, MakeWavBytes({0, 0}, 16000, 1, 1, 8));
    CHECK_THROWS_AS(ReadWav(path), DataError);
  }
  SUBCASE("zero length data chunk") {
    std::string path = tmp.Path("empty.wav");
    vsv_test::SpewBytes(path, MakeWavBytes({}));
    CHECK_THROWS_AS(ReadWav(path), DataError);
  }
  SUBCASE("truncated data") {
    std::string path = tmp.Path("trunc.wav");
    auto b = MakeWavBytes({1, 2, 3, 4});
    b.resize(b.size() - 5);
    vsv_test::SpewBytes(path, b);
    CHECK_THROWS_AS(ReadWav(path), DataError);
  }
  SUBCASE("not riff at all") {
    std::string path = tmp.Path("junk.wav");
    vsv_test::SpewBytes(path, {'j', 'u', 'n', 'k', 'j', 'u', 'n', 'k'});
    CHECK_THROWS_AS(ReadWav(path), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(ReadWav(tmp.Path("nope.wav")), DataError);
  }
}

TEST_CASE("wav writer round-trips through the reader") {
  TempDir tmp("wav");
  std::string path = tmp.Path("rt.wav");
  std::vector<double> samples = {0.0, 0.25, -0.5, 0.9, -0.9, 1.5, -1.5};
  WriteWav(path, samples, 8000);
  Utterance utt = ReadWav(path);
  REQUIRE(utt.samples.size() == samples.size());
  CHECK(utt.sample_rate == 8000);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double expect = std::min(1.0, std::max(-1.0, samples[i]));
    CHECK(utt.samples[i] == doctest::Approx(expect).epsilon(1e-3));
  }
}

TEST_CASE("synthesis is deterministic in spec, phrase and seed") {
  SpeakerSpec spec;
  PhraseTemplate tpl = OneSegmentPhrase(500, 1500, 2500);
  Utterance a = SynthUtterance(spec, tpl, 1234);
  Utterance b = SynthUtterance(spec, tpl, 1234);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(std::memcmp(a.samples.data(), b.samples.data(),
                    a.samples.size() * sizeof(double)) == 0);

  Utterance c = SynthUtterance(spec, tpl, 1235);
  bool same = a.samples.size() == c.samples.size() &&
              std::memcmp(a.samples.data(), c.samples.data(),
                          a.samples.size() * sizeof(double)) == 0;
  CHECK_FALSE(same);
}

TEST_CASE("synthesis honours duration and peak normalization") {
  SpeakerSpec spec;
  PhraseTemplate tpl;
  tpl.phrase_id = "ph1";
  tpl.segments = {PhraseSegment{{500, 1500, 2500}, 800.0, true},
                  PhraseSegment{{400, 1200, 2600}, 700.0, false},
                  PhraseSegment{{600, 1700, 2400}, 500.0, true}};
  Utterance utt = SynthUtterance(spec, tpl, 99);
  // Each segment rounds independently.
  auto expected = static_cast<std::int64_t>(2.0 * 16000);
  CHECK(std::abs(static_cast<std::int64_t>(utt.samples.size()) - expected) <=
        3);

  double peak = 0.0;
  for (double s : utt.samples) peak = std::max(peak, std::abs(s));
  CHECK(peak == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("voiced spectra peak near the scaled formants") {
  SpeakerSpec spec;
  spec.formant_bandwidths = {60.0, 60.0, 60.0};
  spec.noise_floor_db = -60.0;
  spec.vtl_scale = 1.0;
  PhraseTemplate tpl = OneSegmentPhrase(500, 1500, 2500);
  Utterance utt = SynthUtterance(spec, tpl, 7);

  // Energy in a band around each formant must dwarf energy in the troughs
  // between formants.
  std::size_t n = 4096, begin = 8000;
  auto band_energy = [&](double center) {
    double sum = 0.0;
    for (std::size_t k = 1; k < n / 2; ++k) {
      double freq = static_cast<double>(k) * utt.sample_rate / n;
      if (std::abs(freq - center) > 120.0) continue;
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double angle = -2.0 * M_PI * static_cast<double>(k * i) / n;
        re += utt.samples[begin + i] * std::cos(angle);
        im += utt.samples[begin + i] * std::sin(angle);
      }
      sum += re * re + im * im;
    }
    return sum;
  };

  for (double formant : {500.0, 1500.0, 2500.0}) {
    double peak_band = band_energy(formant);
    double trough = band_energy(formant + 500.0);
    CHECK(peak_band > 5.0 * trough);
  }
}

TEST_CASE("longer vocal tract lowers the spectral centroid") {
  PhraseTemplate tpl = OneSegmentPhrase(500, 1500, 2500);
  SpeakerSpec neutral;
  SpeakerSpec longer;
  longer.vtl_scale = 1.1;

  Utterance a = SynthUtterance(neutral, tpl, 42);
  Utterance b = SynthUtterance(longer, tpl, 42);
  double ca = SpectralCentroid(a.samples, 8000, 2048, a.sample_rate);
  double cb = SpectralCentroid(b.samples, 8000, 2048, b.sample_rate);
  CHECK(cb < ca);
}

TEST_CASE("speaker spec and phrase template validation") {
  SpeakerSpec spec;
  spec.vtl_scale = 0.5;
  CHECK_THROWS_AS(spec.Validate(), DataError);

  PhraseTemplate too_short = OneSegmentPhrase(500, 1500, 2500, 300.0);
  CHECK_THROWS_AS(too_short.Validate(), DataError);
  PhraseTemplate too_long = OneSegmentPhrase(500, 1500, 2500, 5000.0);
  CHECK_THROWS_AS(too_long.Validate(), DataError);
  PhraseTemplate unordered = OneSegmentPhrase(1500, 500, 2500);
  CHECK_THROWS_AS(unordered.Validate(), DataError);
}

TEST_CASE("manifest io round-trips and validates") {
  TempDir tmp("manifest");
  std::string path = tmp.Path("m.lst");
  std::vector<ManifestEntry> entries = {
      {"spk01_ph1_e1", "spk01", "ph1", "wav/spk01_ph1_e1.wav"},
      {"spk01_ph2_e1", "spk01", "ph2", "wav/spk01_ph2_e1.wav"},
  };
  WriteManifest(path, entries);
  auto got = ReadManifest(path);
  REQUIRE(got.size() == 2);
  CHECK(got[0].utterance_id == "spk01_ph1_e1");
  CHECK(got[1].phrase_id == "ph2");
  // Relative paths resolve against the manifest directory.
  CHECK(got[0].path == tmp.Path("wav/spk01_ph1_e1.wav"));

  SUBCASE("duplicate utterance ids rejected") {
    entries.push_back(entries[0]);
    WriteManifest(path, entries);
    CHECK_THROWS_AS(ReadManifest(path), DataError);
  }
  SUBCASE("short rows rejected") {
    std::ofstream os(path);
    os << "a b c\n";
    os.close();
    CHECK_THROWS_AS(ReadManifest(path), DataError);
  }
  SUBCASE("empty manifest rejected") {
    std::ofstream os(path);
    os.close();
    CHECK_THROWS_AS(ReadManifest(path), DataError);
  }
}

TEST_CASE("trial builder labels the 2x2 speaker/phrase grid") {
  std::vector<ManifestEntry> enroll, test;
  for (const char *spk : {"A", "B"}) {
    for (const char *ph : {"p1", "p2"}) {
      std::string e_id = std::string(spk) + "_" + ph + "_e1";
      std::string t_id = std::string(spk) + "_" + ph + "_v1";
      enroll.push_back({e_id, spk, ph, "wav/" + e_id + ".wav"});
      test.push_back({t_id, spk, ph, "wav/" + t_id + ".wav"});
    }
  }
  TrialSet set = BuildTrials(enroll, test);
  REQUIRE(set.trials.size() == 16);
  auto counts = set.CountByType();
  CHECK(counts[static_cast<int>(TrialType::kGenuine)] == 4);
  CHECK(counts[static_cast<int>(TrialType::kTargetWrong)] == 4);
  CHECK(counts[static_cast<int>(TrialType::kImposterCorrect)] == 4);
  CHECK(counts[static_cast<int>(TrialType::kImposterWrong)] == 4);

  // Spot-check one trial of each flavour.
  for (const auto &t : set.trials) {
    bool same_spk = t.model_speaker == t.test_utt_id.substr(0, 1);
    bool same_ph = t.test_utt_id.find(t.model_phrase) != std::string::npos;
    if (same_spk && same_ph) CHECK(t.type == TrialType::kGenuine);
    if (!same_spk && !same_ph) CHECK(t.type == TrialType::kImposterWrong);
  }
}

TEST_CASE("trial builder rejects bad partitions") {
  std::vector<ManifestEntry> enroll = {{"u1", "A", "p1", "wav/u1.wav"}};
  std::vector<ManifestEntry> test = {{"u2", "A", "p1", "wav/u2.wav"}};

  SUBCASE("empty inputs") {
    CHECK_THROWS_AS(BuildTrials({}, test), DataError);
    CHECK_THROWS_AS(BuildTrials(enroll, {}), DataError);
  }
  SUBCASE("test utterance reused from enrollment") {
    auto bad_test = test;
    bad_test.push_back(enroll[0]);
    CHECK_THROWS_AS(BuildTrials(enroll, bad_test), DataError);
  }
  SUBCASE("empty id field") {
    auto bad = enroll;
    bad[0].phrase_id = "";
    CHECK_THROWS_AS(BuildTrials(bad, test), DataError);
  }
}

TEST_CASE("trial list round-trips through disk") {
  TempDir tmp("trials");
  std::vector<ManifestEntry> enroll = {
      {"A_p1_e1", "A", "p1", "wav/A_p1_e1.wav"},
      {"B_p1_e1", "B", "p1", "wav/B_p1_e1.wav"}};
  std::vector<ManifestEntry> test = {{"A_p1_v1", "A", "p1", "wav/A_p1_v1.wav"},
                                     {"B_p1_v1", "B", "p1", "wav/B_p1_v1.wav"}};
  TrialSet set = BuildTrials(enroll, test);
  std::string trial_path = tmp.Path("trials.lst");
  WriteTrials(trial_path, set);

  // Reading resolves relative to the trial list location, so the manifest
  // must live in the same directory for paths to line up.
  std::string manifest_path = tmp.Path("test.lst");
  WriteManifest(manifest_path, test);
  auto resolved_test = ReadManifest(manifest_path);
  TrialSet got = ReadTrials(trial_path, resolved_test);

  REQUIRE(got.trials.size() == set.trials.size());
  for (std::size_t i = 0; i < set.trials.size(); ++i) {
    CHECK(got.trials[i].model_id == set.trials[i].model_id);
    CHECK(got.trials[i].model_speaker == set.trials[i].model_speaker);
    CHECK(got.trials[i].test_utt_id == set.trials[i].test_utt_id);
    CHECK(got.trials[i].type == set.trials[i].type);
  }
}

TEST_CASE("corpus generator emits consistent partitions and trials") {
  TempDir tmp("corpus");
  CorpusConfig cfg;
  cfg.num_speakers = 3;
  cfg.num_background_speakers = 2;
  cfg.num_phrases = 2;
  cfg.enroll_sessions = 2;
  cfg.test_sessions = 1;
  cfg.background_sessions = 1;
  cfg.seed = 5;

  CorpusSummary summary = SynthCorpus(cfg, tmp.Path());
  CHECK(summary.background_rows == 2 * 2 * 1);
  CHECK(summary.enroll_rows == 3 * 2 * 2);
  CHECK(summary.test_rows == 3 * 2 * 1);
  CHECK(summary.wav_files ==
        summary.background_rows + summary.enroll_rows + summary.test_rows);

  // models = speakers x phrases; each sees every test utterance.
  std::int64_t models = 3 * 2, tests = summary.test_rows;
  std::int64_t total = 0;
  for (auto c : summary.trial_counts) total += c;
  CHECK(total == models * tests);
  CHECK(summary.trial_counts[static_cast<int>(TrialType::kGenuine)] ==
        models * 1);

  CorpusLayout layout(tmp.Path());
  auto enroll = ReadManifest(layout.EnrollManifest());
  auto test = ReadManifest(layout.TestManifest());
  auto trials = ReadTrials(layout.TrialList(), test);
  CHECK(static_cast<std::int64_t>(trials.trials.size()) == total);
  for (const auto &e : enroll) {
    CHECK(std::filesystem::exists(e.path));
  }
}

TEST_CASE("corpus generation is reproducible for a fixed seed") {
  TempDir tmp_a("corpus_a");
  TempDir tmp_b("corpus_b");
  CorpusConfig cfg;
  cfg.num_speakers = 2;
  cfg.num_background_speakers = 1;
  cfg.num_phrases = 2;
  cfg.enroll_sessions = 1;
  cfg.test_sessions = 1;
  cfg.background_sessions = 1;
  cfg.seed = 77;

  SynthCorpus(cfg, tmp_a.Path());
  SynthCorpus(cfg, tmp_b.Path());

  CorpusLayout la(tmp_a.Path()), lb(tmp_b.Path());
  CHECK(vsv_test::SlurpBytes(la.EnrollManifest()) ==
        vsv_test::SlurpBytes(lb.EnrollManifest()));
  CHECK(vsv_test::SlurpBytes(la.TrialList()) ==
        vsv_test::SlurpBytes(lb.TrialList()));
  CHECK(vsv_test::SlurpBytes(la.root + "/wav/spk01_ph1_e1.wav") ==
        vsv_test::SlurpBytes(lb.root + "/wav/spk01_ph1_e1.wav"));

  // A different seed must change the audio.
  TempDir tmp_c("corpus_c");
  cfg.seed = 78;
  SynthCorpus(cfg, tmp_c.Path());
  CHECK(vsv_test::SlurpBytes(la.root + "/wav/spk01_ph1_e1.wav") !=
        vsv_test::SlurpBytes(tmp_c.Path() + "/wav/spk01_ph1_e1.wav"));
}
