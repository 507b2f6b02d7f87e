// frontend/frontend.cpp

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

#include "vsv/frontend/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "vsv/core/common.hpp"
#include "vsv/core/parallel.hpp"

namespace vsv {
namespace frontend {

namespace {

constexpr double kLogFloor = 1e-10;

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Percentile with linear interpolation between order statistics.
double Percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  double pos = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo >= values.size() - 1) return values.back();
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace

void FrontendConfig::Validate() const {
  if (!(frame_length_ms > 0.0 && frame_shift_ms > 0.0))
    throw ConfigError("frontend: frame length and shift must be positive");
  if (frame_shift_ms > frame_length_ms)
    throw ConfigError("frontend: frame shift exceeds frame length");
  if (num_mel_filters < 2) throw ConfigError("frontend: need >= 2 mel filters");
  if (num_cepstra < 1 || num_cepstra >= num_mel_filters)
    throw ConfigError("frontend: cepstra must lie in [1, num_mel_filters)");
  if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0))
    throw ConfigError("frontend: pre-emphasis outside [0, 1)");
  if (delta_window < 1) throw ConfigError("frontend: delta window < 1");
  if (!(vad_margin_db > 0.0)) throw ConfigError("frontend: VAD margin <= 0");
  if (!(vad_percentile >= 0.0 && vad_percentile < 1.0))
    throw ConfigError("frontend: VAD percentile outside [0, 1)");
}

int FrontendConfig::FrameLength(int sample_rate) const {
  return static_cast<int>(std::lround(frame_length_ms / 1000.0 * sample_rate));
}

int FrontendConfig::FrameShift(int sample_rate) const {
  return static_cast<int>(std::lround(frame_shift_ms / 1000.0 * sample_rate));
}

int FrontendConfig::FftSize(int sample_rate) const {
  int length = FrameLength(sample_rate);
  int n = 1;
  while (n < length) n <<= 1;
  return n;
}

std::int64_t NumFrames(std::int64_t num_samples, int frame_length,
                       int frame_shift) {
  if (num_samples < frame_length) return 0;
  return (num_samples - frame_length) / frame_shift + 1;
}

Eigen::MatrixXd PowerSpectrogram(const Utterance &utt,
                                 const FrontendConfig &config) {
  config.Validate();
  const int length = config.FrameLength(utt.sample_rate);
  const int shift = config.FrameShift(utt.sample_rate);
  const int n_fft = config.FftSize(utt.sample_rate);
  const std::int64_t frames =
      NumFrames(static_cast<std::int64_t>(utt.samples.size()), length, shift);
  if (frames == 0)
    throw DataError("frontend: utterance shorter than one frame");

  const int bins = n_fft / 2 + 1;
  Eigen::MatrixXd power(bins, frames);

  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<std::size_t>(n_fft), 0.0);
  std::vector<std::complex<double>> spectrum;
  for (std::int64_t t = 0; t < frames; ++t) {
    const double *src = utt.samples.data() + t * shift;
    for (int i = 0; i < length; ++i) frame[static_cast<std::size_t>(i)] =
        src[i];
    std::fill(frame.begin() + length, frame.end(), 0.0);

    // Pre-emphasis inside the frame; the first sample is scaled rather than
    // differenced against the previous frame.
    for (int i = length - 1; i > 0; --i)
      frame[static_cast<std::size_t>(i)] -=
          config.pre_emphasis * frame[static_cast<std::size_t>(i - 1)];
    frame[0] *= 1.0 - config.pre_emphasis;

    for (int i = 0; i < length; ++i) {
      double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (length - 1));
      frame[static_cast<std::size_t>(i)] *= w;
    }

    fft.fwd(spectrum, frame);
    for (int k = 0; k < bins; ++k)
      power(k, t) = std::norm(spectrum[static_cast<std::size_t>(k)]);
  }
  return power;
}

Eigen::MatrixXd MelFilterbank(int sample_rate, int n_fft, int num_filters) {
  const int bins = n_fft / 2 + 1;
  const double f_max = sample_rate / 2.0;
  const double mel_max = HzToMel(f_max);

  // num_filters triangles need num_filters + 2 boundary points.
  std::vector<double> centers(static_cast<std::size_t>(num_filters) + 2);
  for (std::size_t i = 0; i < centers.size(); ++i)
    centers[i] =
        MelToHz(mel_max * static_cast<double>(i) / (num_filters + 1));

  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(num_filters, bins);
  for (int m = 1; m <= num_filters; ++m) {
    double left = centers[static_cast<std::size_t>(m - 1)];
    double mid = centers[static_cast<std::size_t>(m)];
    double right = centers[static_cast<std::size_t>(m + 1)];
    for (int k = 0; k < bins; ++k) {
      double freq = static_cast<double>(k) * sample_rate / n_fft;
      if (freq <= left || freq >= right) continue;
      double w = freq <= mid ? (freq - left) / (mid - left)
                             : (right - freq) / (right - mid);
      weights(m - 1, k) = w;
    }
  }
  return weights;
}

Eigen::MatrixXd DctMatrix(int num_cepstra, int num_filters) {
  Eigen::MatrixXd dct(num_cepstra, num_filters);
  double scale = std::sqrt(2.0 / num_filters);
  for (int i = 1; i <= num_cepstra; ++i)
    for (int m = 0; m < num_filters; ++m)
      dct(i - 1, m) =
          scale * std::cos(M_PI * i * (m + 0.5) / num_filters);
  return dct;
}

namespace {

// Shared tail of the static-MFCC path: optional warp, filterbank, log, DCT.
Eigen::MatrixXd CepstraFromPower(const Eigen::MatrixXd &power,
                                 const FrontendConfig &config,
                                 int sample_rate, const WarpConfig *warp) {
  const int n_fft = config.FftSize(sample_rate);
  const auto bins = power.rows();
  const auto frames = power.cols();

  Eigen::MatrixXd mel_weights =
      MelFilterbank(sample_rate, n_fft, config.num_mel_filters);
  Eigen::MatrixXd dct = DctMatrix(config.num_cepstra, config.num_mel_filters);

  Eigen::MatrixXd spectra;
  if (warp != nullptr && warp->alpha != 1.0) {
    spectra.resize(bins, frames);
    std::vector<double> column(static_cast<std::size_t>(bins));
    for (Eigen::Index t = 0; t < frames; ++t) {
      Eigen::VectorXd::Map(column.data(), bins) = power.col(t);
      std::vector<double> warped = WarpSpectrum(column, *warp);
      spectra.col(t) =
          Eigen::Map<const Eigen::VectorXd>(warped.data(), bins);
    }
  } else {
    spectra = power;
  }

  Eigen::MatrixXd mel = mel_weights * spectra;
  mel = mel.cwiseMax(kLogFloor).array().log().matrix();
  return dct * mel;
}

}  // namespace

Eigen::MatrixXd StaticMfcc(const Utterance &utt, const FrontendConfig &config,
                           const WarpConfig *warp) {
  Eigen::MatrixXd power = PowerSpectrogram(utt, config);
  return CepstraFromPower(power, config, utt.sample_rate, warp);
}

void RastaFilter(Eigen::MatrixXd *features) {
  const auto frames = features->cols();
  if (frames < 5)
    throw DataError("rasta: needs at least 5 frames, got " +
                    std::to_string(frames));
  const auto dims = features->rows();
  Eigen::MatrixXd x = *features;
  auto in = [&x, dims](Eigen::Index t) -> Eigen::VectorXd {
    if (t >= 0) return x.col(t);
    return Eigen::VectorXd::Zero(dims);
  };
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(dims);
  for (Eigen::Index t = 0; t < frames; ++t) {
    Eigen::VectorXd y =
        0.98 * prev +
        0.1 * (2.0 * in(t) + in(t - 1) - in(t - 3) - 2.0 * in(t - 4));
    features->col(t) = y;
    prev = y;
  }
}

Eigen::MatrixXd AppendDeltas(const Eigen::MatrixXd &static_features,
                             int delta_window) {
  const auto dims = static_features.rows();
  const auto frames = static_features.cols();

  double denom = 0.0;
  for (int k = 1; k <= delta_window; ++k) denom += 2.0 * k * k;

  auto deltas_of = [&](const Eigen::MatrixXd &src) {
    Eigen::MatrixXd d(dims, frames);
    for (Eigen::Index t = 0; t < frames; ++t) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(dims);
      for (int k = 1; k <= delta_window; ++k) {
        Eigen::Index hi = std::min<Eigen::Index>(t + k, frames - 1);
        Eigen::Index lo = std::max<Eigen::Index>(t - k, 0);
        acc += k * (src.col(hi) - src.col(lo));
      }
      d.col(t) = acc / denom;
    }
    return d;
  };

  Eigen::MatrixXd delta = deltas_of(static_features);
  Eigen::MatrixXd delta2 = deltas_of(delta);

  Eigen::MatrixXd out(dims * 3, frames);
  out.topRows(dims) = static_features;
  out.middleRows(dims, dims) = delta;
  out.bottomRows(dims) = delta2;
  return out;
}

std::vector<std::uint8_t> EnergyVad(const Utterance &utt,
                                    const FrontendConfig &config) {
  config.Validate();
  const int length = config.FrameLength(utt.sample_rate);
  const int shift = config.FrameShift(utt.sample_rate);
  const std::int64_t frames =
      NumFrames(static_cast<std::int64_t>(utt.samples.size()), length, shift);
  if (frames == 0)
    throw DataError("vad: utterance shorter than one frame");

  std::vector<double> energy_db(static_cast<std::size_t>(frames));
  for (std::int64_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    const double *src = utt.samples.data() + t * shift;
    for (int i = 0; i < length; ++i) sum += src[i] * src[i];
    energy_db[static_cast<std::size_t>(t)] =
        10.0 * std::log10(sum + 1e-20);
  }

  double peak = *std::max_element(energy_db.begin(), energy_db.end());
  double floor_db = Percentile(energy_db, config.vad_percentile);

  std::vector<std::uint8_t> keep(static_cast<std::size_t>(frames));
  // The percentile gate allows a tiny tolerance below the threshold so a
  // stationary signal, whose frame energies differ only by rounding, keeps
  // every frame instead of losing the bottom quantile to noise-level ties.
  constexpr double kTieToleranceDb = 1e-6;
  for (std::size_t t = 0; t < keep.size(); ++t) {
    keep[t] = (energy_db[t] > peak - config.vad_margin_db) &&
              (energy_db[t] >= floor_db - kTieToleranceDb);
  }
  return keep;
}

CmvnResult ApplyCmvn(const Eigen::MatrixXd &features,
                     const std::vector<std::uint8_t> &keep,
                     double variance_floor) {
  if (static_cast<Eigen::Index>(keep.size()) != features.cols())
    throw DataError("cmvn: mask length does not match frame count");
  Eigen::Index selected = 0;
  for (auto k : keep) selected += (k != 0);
  if (selected == 0)
    throw DataError("cmvn: no frames selected by the speech mask");

  const auto dims = features.rows();
  CmvnResult result;
  result.values.resize(dims, selected);
  Eigen::Index col = 0;
  for (Eigen::Index t = 0; t < features.cols(); ++t)
    if (keep[static_cast<std::size_t>(t)]) result.values.col(col++) =
        features.col(t);

  Eigen::VectorXd mean = result.values.rowwise().mean();
  result.values.colwise() -= mean;
  Eigen::VectorXd var =
      result.values.array().square().rowwise().mean().matrix();
  for (Eigen::Index d = 0; d < dims; ++d) {
    if (var(d) < variance_floor) {
      var(d) = variance_floor;
      result.floored_dims.push_back(static_cast<int>(d));
    }
  }
  if (!result.floored_dims.empty()) {
    logging::Warn("cmvn: variance floored on " +
                  std::to_string(result.floored_dims.size()) +
                  " dimension(s)");
  }
  Eigen::VectorXd inv_std = var.array().sqrt().inverse().matrix();
  result.values.array().colwise() *= inv_std.array();
  return result;
}

namespace {

FeatureMatrix FinishPipeline(const Eigen::MatrixXd &power,
                             const Utterance &utt,
                             const FrontendConfig &config,
                             int alpha_hundredths,
                             const std::vector<std::uint8_t> &mask) {
  WarpConfig warp =
      WarpConfig::Make(AlphaFromHundredths(alpha_hundredths),
                       utt.sample_rate / 2.0);
  Eigen::MatrixXd cepstra = CepstraFromPower(
      power, config, utt.sample_rate, alpha_hundredths == 100 ? nullptr : &warp);
  if (config.apply_rasta) RastaFilter(&cepstra);
  Eigen::MatrixXd full = AppendDeltas(cepstra, config.delta_window);
  CmvnResult cmvn = ApplyCmvn(full, mask, config.variance_floor);

  FeatureMatrix fm;
  fm.values = std::move(cmvn.values);
  fm.utterance_id = utt.Id();
  fm.alpha_hundredths = alpha_hundredths;
  return fm;
}

}  // namespace

FeatureMatrix ExtractFeatures(const Utterance &utt,
                              const FrontendConfig &config,
                              int alpha_hundredths,
                              const std::vector<std::uint8_t> *mask) {
  Eigen::MatrixXd power = PowerSpectrogram(utt, config);
  std::vector<std::uint8_t> own_mask;
  if (mask == nullptr) {
    own_mask = EnergyVad(utt, config);
    mask = &own_mask;
  }
  return FinishPipeline(power, utt, config, alpha_hundredths, *mask);
}

std::map<int, FeatureMatrix> ExtractWarpGrid(const Utterance &utt,
                                             const FrontendConfig &config,
                                             const std::vector<int> &grid) {
  if (grid.empty()) throw ConfigError("warp grid is empty");
  // The spectrogram and speech mask come from the unwarped signal once; every
  // warp factor reuses them.
  Eigen::MatrixXd power = PowerSpectrogram(utt, config);
  std::vector<std::uint8_t> mask = EnergyVad(utt, config);

  std::vector<FeatureMatrix> results(grid.size());
  par::For(static_cast<std::int64_t>(grid.size()), [&](std::int64_t i) {
    results[static_cast<std::size_t>(i)] =
        FinishPipeline(power, utt, config, grid[static_cast<std::size_t>(i)],
                       mask);
  });

  std::map<int, FeatureMatrix> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[grid[i]] = std::move(results[i]);
  return out;
}

}  // namespace frontend

namespace ref {

std::vector<double> PowerSpectrumDft(const std::vector<double> &frame,
                                     int n_fft) {
  const int bins = n_fft / 2 + 1;
  std::vector<double> power(static_cast<std::size_t>(bins), 0.0);
  for (int k = 0; k < bins; ++k) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n_fft; ++i) {
      double x =
          i < static_cast<int>(frame.size()) ? frame[static_cast<std::size_t>(i)]
                                             : 0.0;
      double angle = -2.0 * M_PI * static_cast<double>(k) * i / n_fft;
      re += x * std::cos(angle);
      im += x * std::sin(angle);
    }
    power[static_cast<std::size_t>(k)] = re * re + im * im;
  }
  return power;
}

}  // namespace ref
}  // namespace vsv
