// vsv/frontend/frontend.hpp

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

#ifndef VSV_FRONTEND_FRONTEND_HPP_
#define VSV_FRONTEND_FRONTEND_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsv/corpus/wav.hpp"
#include "vsv/frontend/warp.hpp"

namespace vsv {

// Features are dim x frames, one column per frame.  Values stay double in
// memory; the on-disk container narrows to f32.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::string utterance_id;
  int alpha_hundredths = 100;

  Eigen::Index Dim() const { return values.rows(); }
  Eigen::Index Frames() const { return values.cols(); }
};

namespace frontend {

struct FrontendConfig {
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int num_mel_filters = 26;
  int num_cepstra = 19;  // c1..c19; c0 is dropped
  double pre_emphasis = 0.97;
  bool apply_rasta = true;
  int delta_window = 2;
  double vad_margin_db = 30.0;   // keep frames within this of the peak
  double vad_percentile = 0.20;  // and at or above this energy quantile
  double variance_floor = 1e-10;

  void Validate() const;
  int FrameLength(int sample_rate) const;
  int FrameShift(int sample_rate) const;
  int FftSize(int sample_rate) const;  // next power of two >= frame length
};

// Frame count with snipped edges: only frames that fit entirely inside the
// signal are emitted.
std::int64_t NumFrames(std::int64_t num_samples, int frame_length,
                       int frame_shift);

// |FFT|^2 of pre-emphasized, Hamming-windowed frames; (n_fft/2 + 1) x T.
Eigen::MatrixXd PowerSpectrogram(const Utterance &utt,
                                 const FrontendConfig &config);

// Triangular mel filter weights, num_filters x (n_fft/2 + 1), filters spread
// evenly on the mel scale over [0, sample_rate / 2].
Eigen::MatrixXd MelFilterbank(int sample_rate, int n_fft, int num_filters);

// DCT-II rows for c1..c_num_cepstra with sqrt(2/M) scaling.
Eigen::MatrixXd DctMatrix(int num_cepstra, int num_filters);

// Static cepstra (num_cepstra x T).  A non-null warp resamples each frame's
// power spectrum before the filterbank.
Eigen::MatrixXd StaticMfcc(const Utterance &utt, const FrontendConfig &config,
                           const WarpConfig *warp = nullptr);

// Band-pass filters each coefficient's trajectory:
//   y[t] = 0.98 y[t-1] + 0.1 (2 x[t] + x[t-1] - x[t-3] - 2 x[t-4])
// with zero initial state.  Fewer than 5 frames is an error.
void RastaFilter(Eigen::MatrixXd *features);

// Appends first and second order deltas (window +/- delta_window, edges
// replicated); D -> 3D.
Eigen::MatrixXd AppendDeltas(const Eigen::MatrixXd &static_features,
                             int delta_window);

// Energy-based speech mask, one flag per frame.  A frame is kept when its
// log energy clears both an absolute margin below the utterance peak and the
// energy percentile.  The mask depends only on the raw signal, never on the
// warp factor.
std::vector<std::uint8_t> EnergyVad(const Utterance &utt,
                                    const FrontendConfig &config);

struct CmvnResult {
  Eigen::MatrixXd values;          // selected frames only
  std::vector<int> floored_dims;   // dims whose variance hit the floor
};

// Mean/variance normalization over the selected frames; unselected frames
// are dropped from the output.
CmvnResult ApplyCmvn(const Eigen::MatrixXd &features,
                     const std::vector<std::uint8_t> &keep,
                     double variance_floor);

// Full chain for one warp factor: static MFCC (warped) -> RASTA -> deltas ->
// VAD selection -> CMVN.  The mask may be precomputed (shared across warp
// factors); pass nullptr to derive it from the utterance.
FeatureMatrix ExtractFeatures(const Utterance &utt,
                              const FrontendConfig &config,
                              int alpha_hundredths,
                              const std::vector<std::uint8_t> *mask = nullptr);

// Runs the whole grid.  The spectrogram and VAD mask are computed once from
// the unwarped signal and shared; warp factors are processed in parallel.
std::map<int, FeatureMatrix> ExtractWarpGrid(const Utterance &utt,
                                             const FrontendConfig &config,
                                             const std::vector<int> &grid);

}  // namespace frontend

namespace ref {

// Direct O(n^2) DFT power spectrum, the test oracle for the FFT path.
std::vector<double> PowerSpectrumDft(const std::vector<double> &frame,
                                     int n_fft);

}  // namespace ref
}  // namespace vsv

#endif  // VSV_FRONTEND_FRONTEND_HPP_
