// vsv/nn/mlp.hpp

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

#ifndef VSV_NN_MLP_HPP_
#define VSV_NN_MLP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsv/frontend/frontend.hpp"
#include "vsv/nn/pca.hpp"

namespace vsv {
namespace nn {

// Feed-forward speaker classifier.  Layer l maps its input a[l] to
// a[l+1] = act(w[l]·a[l] + b[l]): sigmoid on every hidden layer, softmax on
// the last.  w[l] is (out x in); batches are one column per frame.
struct MlpParams {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;

  Eigen::Index NumLayers() const {
    return static_cast<Eigen::Index>(w.size());
  }
  Eigen::Index InputDim() const { return w.empty() ? 0 : w.front().cols(); }
  Eigen::Index OutputDim() const { return w.empty() ? 0 : w.back().rows(); }

  // DataError when layer shapes fail to chain; NumericError on non-finite
  // parameters.
  void Validate() const;
};

struct MlpGradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};

// Hidden weights ~ N(0, 1/sqrt(fan_in)); all biases zero.  The output layer
// is zero too, so the initial posterior is exactly uniform and the initial
// cross-entropy is exactly ln(num_classes).
MlpParams InitMlp(Eigen::Index input_dim, Eigen::Index hidden_width,
                  int hidden_layers, Eigen::Index num_classes,
                  std::uint64_t seed);

// Forward pass over a batch (input_dim x B).  Returns activations
// a[0..NumLayers()]: a[0] is the input, a[l] for hidden l the sigmoid
// outputs, the last entry the softmax posteriors (columns sum to 1).
std::vector<Eigen::MatrixXd> MlpForward(const MlpParams &params,
                                        const Eigen::MatrixXd &input);

// Mean cross-entropy of the batch under the current parameters; fills
// *grads with d(loss)/d(param) when grads is non-null.
double MlpLossAndGrad(const MlpParams &params, const Eigen::MatrixXd &input,
                      const std::vector<int> &labels, MlpGradients *grads);

// 11-frame splicing: each output column stacks the frames at offsets
// -(context-1)/2 .. +(context-1)/2, with edge frames replicated.  context
// must be odd and positive.
Eigen::MatrixXd StackContext(const Eigen::MatrixXd &features, int context);

struct SpkBnTrainConfig {
  int hidden_layers = 7;
  int hidden_width = 1024;
  int context = 11;
  int epochs = 30;
  int batch_size = 256;
  // Epochs at which the batch size doubles, realizing the 256 -> 1024 ramp.
  std::vector<int> batch_double_epochs = {10, 20};
  double lr_start = 0.8;
  double lr_end = 0.08;
  std::uint64_t seed = 0;

  void Validate() const;
};

// The trained classifier plus everything extraction needs to reproduce its
// input convention.
struct SpkBnModel {
  MlpParams params;
  int context = 11;
  std::vector<std::string> speakers;  // output index -> speaker label
  double initial_loss = 0.0;          // full-set cross-entropy before training
  std::vector<double> epoch_loss;     // mean cross-entropy per epoch

  void WriteFile(const std::string &path) const;
  static SpkBnModel ReadFile(const std::string &path);
};

// Minibatch SGD on cross-entropy.  The learning rate decays log-linearly
// from lr_start to lr_end across epochs; the batch size doubles at each
// epoch listed in batch_double_epochs.  DataError with fewer than two
// distinct speakers.
SpkBnModel TrainSpkBn(const std::vector<Eigen::MatrixXd> &features,
                      const std::vector<std::string> &speakers,
                      const SpkBnTrainConfig &config);

// Context-stacked activations of hidden layer `tap` (1-based, so tap=4 is
// the fourth hidden layer) pooled over the given frames; used to fit the
// bottleneck PCA.  ConfigError when tap is out of range.
Eigen::MatrixXd MlpTapActivations(const SpkBnModel &model,
                                  const Eigen::MatrixXd &features, int tap);

// Bottleneck extraction: tap activations projected by the PCA.  Frame count
// and feature identity are preserved.
FeatureMatrix ExtractMlpBn(const FeatureMatrix &feature,
                           const SpkBnModel &model, int tap,
                           const PcaProjection &pca);

}  // namespace nn
}  // namespace vsv

#endif  // VSV_NN_MLP_HPP_
