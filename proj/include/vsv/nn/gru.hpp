// vsv/nn/gru.hpp

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

#ifndef VSV_NN_GRU_HPP_
#define VSV_NN_GRU_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsv/frontend/frontend.hpp"
#include "vsv/nn/pca.hpp"

namespace vsv {
namespace nn {

// One standard GRU cell (sigmoid gates, tanh candidate):
//   z_t = sigm(wz x_t + uz h_{t-1} + bz)
//   r_t = sigm(wr x_t + ur h_{t-1} + br)
//   c_t = tanh(wh x_t + uh (r_t . h_{t-1}) + bh)
//   h_t = (1 - z_t) . h_{t-1} + z_t . c_t,   h_0 = 0.
// Each layer's output sequence is ReLU(h_t); the next layer consumes it, and
// the last layer's ReLU output feeds a linear head.
struct GruLayer {
  Eigen::MatrixXd wz, uz, wr, ur, wh, uh;  // wz: H x I, uz: H x H, ...
  Eigen::VectorXd bz, br, bh;
};

struct GruParams {
  std::vector<GruLayer> layers;
  Eigen::MatrixXd head_w;  // out x H
  Eigen::VectorXd head_b;

  Eigen::Index NumLayers() const {
    return static_cast<Eigen::Index>(layers.size());
  }
  Eigen::Index InputDim() const {
    return layers.empty() ? 0 : layers.front().wz.cols();
  }
  Eigen::Index HiddenDim() const {
    return layers.empty() ? 0 : layers.front().wz.rows();
  }
  Eigen::Index OutputDim() const { return head_w.rows(); }

  // DataError when gate shapes fail to chain; NumericError on non-finite
  // parameters.
  void Validate() const;

  void WriteFile(const std::string &path) const;
  static GruParams ReadFile(const std::string &path);
};

// Gradients mirror the parameter layout.
struct GruGradients {
  std::vector<GruLayer> layers;
  Eigen::MatrixXd head_w;
  Eigen::VectorXd head_b;
};

// Gate weights ~ N(0, 1/sqrt(fan_in)), biases zero.  The head is zero, so a
// freshly initialized model predicts the zero sequence.
GruParams InitGru(Eigen::Index input_dim, Eigen::Index hidden_dim, int layers,
                  Eigen::Index output_dim, std::uint64_t seed);

struct GruForwardResult {
  std::vector<Eigen::MatrixXd> outputs;  // ReLU(h) per layer, H x T
  Eigen::MatrixXd predictions;           // head output, out x T
};

// Deterministic forward pass over one sequence (dim x T columns).
GruForwardResult GruForward(const GruParams &params,
                            const Eigen::MatrixXd &seq);

// Shift-prediction L1 loss over one (possibly zero-padded) crop: the sum of
// |y_i - x_{i+shift}|_1 over positions i with i + shift < valid_len.
// Returns the unnormalized sum; *num_terms (when non-null) receives the
// number of scalar residuals; *grads (when non-null) receives gradients of
// the sum via backpropagation through time.
double ApcLossAndGrad(const GruParams &params, const Eigen::MatrixXd &seq,
                      int shift, Eigen::Index valid_len, GruGradients *grads,
                      Eigen::Index *num_terms);

// Plug-in evaluation of the prediction loss on a full sequence:
// sum_i |y_i - x_{i+shift}|_1.  For a zero head this equals sum |x_{i+shift}|
// exactly.
double ApcSequenceLoss(const GruParams &params, const Eigen::MatrixXd &seq,
                       int shift);

struct ApcTrainConfig {
  int layers = 3;
  int hidden = 512;
  int shift = 5;  // predict the frame `shift` steps ahead
  int epochs = 20;
  int batch_size = 32;
  int crop_length = 64;
  double learning_rate = 0.001;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct ApcModel {
  GruParams params;
  double initial_loss = 0.0;       // mean per-frame L1 before training
  std::vector<double> epoch_loss;  // mean per-frame L1 per epoch
};

// Minibatch SGD on the masked L1 shift-prediction loss over fixed-length
// crops (zero-padded tails are excluded from the loss).  Utterances with no
// valid target position are skipped with a warning; DataError when every
// utterance is shorter than shift + 1 frames.
ApcModel TrainApc(const std::vector<Eigen::MatrixXd> &features,
                  const ApcTrainConfig &config);

// Last layer's ReLU output sequence, the representation tapped before the
// linear head; used to fit the bottleneck PCA.
Eigen::MatrixXd GruTapActivations(const GruParams &params,
                                  const Eigen::MatrixXd &seq);

// Bottleneck extraction: tap activations projected by the PCA.  Frame count
// and feature identity are preserved.
FeatureMatrix ExtractApcBn(const FeatureMatrix &feature,
                           const GruParams &params, const PcaProjection &pca);

}  // namespace nn
}  // namespace vsv

#endif  // VSV_NN_GRU_HPP_
