// vsv/nn/mlp.cpp

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

#include "vsv/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "vsv/core/common.hpp"
#include "vsv/core/rng.hpp"
#include "vsv/nn/nn_io.hpp"

namespace vsv {
namespace nn {

namespace {

Eigen::MatrixXd Sigmoid(const Eigen::MatrixXd &z) {
  return ((-z.array()).exp() + 1.0).inverse().matrix();
}

// Softmax per column, shifted by the column max for stability.
Eigen::MatrixXd Softmax(const Eigen::MatrixXd &z) {
  Eigen::MatrixXd shifted =
      (z.rowwise() - z.colwise().maxCoeff()).array().exp().matrix();
  Eigen::RowVectorXd sums = shifted.colwise().sum();
  return (shifted.array().rowwise() / sums.array()).matrix();
}

}  // namespace

void MlpParams::Validate() const {
  if (w.empty()) throw DataError("mlp: no layers");
  if (w.size() != b.size())
    throw DataError("mlp: weight and bias layer counts differ");
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (w[l].rows() == 0 || w[l].cols() == 0)
      throw DataError("mlp: empty layer " + std::to_string(l));
    if (b[l].size() != w[l].rows())
      throw DataError("mlp: bias size mismatch at layer " + std::to_string(l));
    if (l > 0 && w[l].cols() != w[l - 1].rows())
      throw DataError("mlp: layer shapes do not chain at layer " +
                      std::to_string(l));
    if (!w[l].allFinite() || !b[l].allFinite())
      throw NumericError("mlp: non-finite parameters at layer " +
                         std::to_string(l));
  }
}

MlpParams InitMlp(Eigen::Index input_dim, Eigen::Index hidden_width,
                  int hidden_layers, Eigen::Index num_classes,
                  std::uint64_t seed) {
  if (input_dim < 1 || hidden_width < 1 || hidden_layers < 1 ||
      num_classes < 1)
    throw DataError("mlp: non-positive layer dimensions");
  Rng rng(Rng::Mix(seed, Rng::HashBytes("mlp-init")));
  MlpParams params;
  Eigen::Index in = input_dim;
  for (int l = 0; l < hidden_layers; ++l) {
    Eigen::MatrixXd w(hidden_width, in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        w(i, j) = scale * rng.Normal();
    params.w.push_back(std::move(w));
    params.b.push_back(Eigen::VectorXd::Zero(hidden_width));
    in = hidden_width;
  }
  // Zero output layer: uniform initial posterior, so the first
  // cross-entropy is ln(num_classes) exactly.
  params.w.push_back(Eigen::MatrixXd::Zero(num_classes, in));
  params.b.push_back(Eigen::VectorXd::Zero(num_classes));
  return params;
}

std::vector<Eigen::MatrixXd> MlpForward(const MlpParams &params,
                                        const Eigen::MatrixXd &input) {
  if (input.rows() != params.InputDim())
    throw DataError("mlp: input dimension " + std::to_string(input.rows()) +
                    " does not match network input " +
                    std::to_string(params.InputDim()));
  const Eigen::Index num_layers = params.NumLayers();
  std::vector<Eigen::MatrixXd> a(static_cast<std::size_t>(num_layers) + 1);
  a[0] = input;
  for (Eigen::Index l = 0; l < num_layers; ++l) {
    Eigen::MatrixXd z =
        (params.w[static_cast<std::size_t>(l)] * a[static_cast<std::size_t>(l)])
            .colwise() +
        params.b[static_cast<std::size_t>(l)];
    a[static_cast<std::size_t>(l) + 1] =
        l + 1 < num_layers ? Sigmoid(z) : Softmax(z);
  }
  return a;
}

double MlpLossAndGrad(const MlpParams &params, const Eigen::MatrixXd &input,
                      const std::vector<int> &labels, MlpGradients *grads) {
  const Eigen::Index batch = input.cols();
  if (batch == 0) throw DataError("mlp: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != batch)
    throw DataError("mlp: label count does not match batch size");
  const Eigen::Index classes = params.OutputDim();
  for (int label : labels)
    if (label < 0 || label >= classes)
      throw DataError("mlp: label out of range");

  std::vector<Eigen::MatrixXd> a = MlpForward(params, input);

  // Cross-entropy from logits in log-sum-exp form; recompute the final
  // logits so the loss never passes through a clipped probability.
  const std::size_t last = a.size() - 2;
  Eigen::MatrixXd logits =
      (params.w.back() * a[last]).colwise() + params.b.back();
  Eigen::RowVectorXd max = logits.colwise().maxCoeff();
  Eigen::RowVectorXd lse =
      ((logits.rowwise() - max).array().exp().colwise().sum().log() +
       max.array())
          .matrix();
  double loss = 0.0;
  for (Eigen::Index j = 0; j < batch; ++j)
    loss += lse(j) - logits(labels[static_cast<std::size_t>(j)], j);
  loss /= static_cast<double>(batch);

  if (grads == nullptr) return loss;

  grads->w.assign(params.w.size(), Eigen::MatrixXd());
  grads->b.assign(params.b.size(), Eigen::VectorXd());

  // d(mean CE)/d(logits) = (posterior - onehot) / batch.
  Eigen::MatrixXd delta = a.back();
  for (Eigen::Index j = 0; j < batch; ++j)
    delta(labels[static_cast<std::size_t>(j)], j) -= 1.0;
  delta /= static_cast<double>(batch);

  for (std::size_t l = params.w.size(); l-- > 0;) {
    grads->w[l] = delta * a[l].transpose();
    grads->b[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = params.w[l].transpose() * delta;
      delta.array() *= a[l].array() * (1.0 - a[l].array());
    }
  }
  return loss;
}

Eigen::MatrixXd StackContext(const Eigen::MatrixXd &features, int context) {
  if (context < 1 || context % 2 == 0)
    throw DataError("context window must be odd and positive, got " +
                    std::to_string(context));
  const Eigen::Index dim = features.rows();
  const Eigen::Index frames = features.cols();
  if (frames == 0) return Eigen::MatrixXd(dim * context, 0);
  const int half = context / 2;
  Eigen::MatrixXd stacked(dim * context, frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int k = -half; k <= half; ++k) {
      Eigen::Index source = std::clamp<Eigen::Index>(t + k, 0, frames - 1);
      stacked.block((k + half) * dim, t, dim, 1) = features.col(source);
    }
  }
  return stacked;
}

void SpkBnTrainConfig::Validate() const {
  if (hidden_layers < 1 || hidden_width < 1)
    throw ConfigError("spkbn: non-positive network shape");
  if (context < 1 || context % 2 == 0)
    throw ConfigError("spkbn: context must be odd and positive");
  if (epochs < 1) throw ConfigError("spkbn: epochs must be positive");
  if (batch_size < 1) throw ConfigError("spkbn: batch size must be positive");
  if (lr_start <= 0.0 || lr_end <= 0.0)
    throw ConfigError("spkbn: learning rates must be positive");
}

namespace {

// Log-linear interpolation between lr_start and lr_end across epochs.
double EpochLearningRate(const SpkBnTrainConfig &config, int epoch) {
  if (config.epochs == 1) return config.lr_start;
  const double frac =
      static_cast<double>(epoch) / static_cast<double>(config.epochs - 1);
  return std::exp(std::log(config.lr_start) +
                  frac * (std::log(config.lr_end) - std::log(config.lr_start)));
}

int EpochBatchSize(const SpkBnTrainConfig &config, int epoch) {
  int batch = config.batch_size;
  for (int boundary : config.batch_double_epochs)
    if (epoch >= boundary) batch *= 2;
  return batch;
}

}  // namespace

SpkBnModel TrainSpkBn(const std::vector<Eigen::MatrixXd> &features,
                      const std::vector<std::string> &speakers,
                      const SpkBnTrainConfig &config) {
  config.Validate();
  if (features.size() != speakers.size())
    throw DataError("spkbn: feature and speaker list sizes differ");
  if (features.empty()) throw DataError("spkbn: no training utterances");

  // Deterministic class indexing: sorted unique speaker labels.
  std::map<std::string, int> class_of;
  for (const auto &speaker : speakers) class_of.emplace(speaker, 0);
  if (class_of.size() < 2)
    throw DataError("spkbn: speaker classifier needs at least 2 speakers, got " +
                    std::to_string(class_of.size()));
  SpkBnModel model;
  model.context = config.context;
  for (auto &[name, index] : class_of) {
    index = static_cast<int>(model.speakers.size());
    model.speakers.push_back(name);
  }

  const Eigen::Index dim = features.front().rows();
  Eigen::Index total = 0;
  for (const auto &utt : features) {
    if (utt.rows() != dim)
      throw DataError("spkbn: inconsistent feature dimensions");
    total += utt.cols();
  }
  if (total == 0) throw DataError("spkbn: no frames");

  Eigen::MatrixXd pool(dim * config.context, total);
  std::vector<int> labels(static_cast<std::size_t>(total));
  Eigen::Index at = 0;
  for (std::size_t u = 0; u < features.size(); ++u) {
    const Eigen::Index frames = features[u].cols();
    if (frames == 0) continue;
    pool.middleCols(at, frames) = StackContext(features[u], config.context);
    std::fill(labels.begin() + at, labels.begin() + at + frames,
              class_of[speakers[u]]);
    at += frames;
  }

  model.params = InitMlp(pool.rows(), config.hidden_width,
                         config.hidden_layers,
                         static_cast<Eigen::Index>(model.speakers.size()),
                         config.seed);
  model.initial_loss = MlpLossAndGrad(model.params, pool, labels, nullptr);

  Rng rng(Rng::Mix(config.seed, Rng::HashBytes("spkbn-train")));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);

  MlpGradients grads;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(&order);
    const double lr = EpochLearningRate(config, epoch);
    const Eigen::Index batch_size = EpochBatchSize(config, epoch);
    double epoch_sum = 0.0;
    Eigen::Index seen = 0;
    for (Eigen::Index start = 0; start < total; start += batch_size) {
      const Eigen::Index count = std::min(batch_size, total - start);
      Eigen::MatrixXd batch(pool.rows(), count);
      std::vector<int> batch_labels(static_cast<std::size_t>(count));
      for (Eigen::Index j = 0; j < count; ++j) {
        batch.col(j) = pool.col(order[static_cast<std::size_t>(start + j)]);
        batch_labels[static_cast<std::size_t>(j)] =
            labels[static_cast<std::size_t>(
                order[static_cast<std::size_t>(start + j)])];
      }
      const double loss =
          MlpLossAndGrad(model.params, batch, batch_labels, &grads);
      for (std::size_t l = 0; l < model.params.w.size(); ++l) {
        model.params.w[l] -= lr * grads.w[l];
        model.params.b[l] -= lr * grads.b[l];
      }
      epoch_sum += loss * static_cast<double>(count);
      seen += count;
    }
    model.epoch_loss.push_back(epoch_sum / static_cast<double>(seen));
  }
  return model;
}

Eigen::MatrixXd MlpTapActivations(const SpkBnModel &model,
                                  const Eigen::MatrixXd &features, int tap) {
  if (tap < 1 || tap >= model.params.NumLayers())
    throw ConfigError("mlp tap " + std::to_string(tap) +
                      " out of range: network has " +
                      std::to_string(model.params.NumLayers() - 1) +
                      " hidden layers");
  Eigen::MatrixXd stacked = StackContext(features, model.context);
  std::vector<Eigen::MatrixXd> a = MlpForward(model.params, stacked);
  return a[static_cast<std::size_t>(tap)];
}

FeatureMatrix ExtractMlpBn(const FeatureMatrix &feature,
                           const SpkBnModel &model, int tap,
                           const PcaProjection &pca) {
  Eigen::MatrixXd act = MlpTapActivations(model, feature.values, tap);
  FeatureMatrix out;
  out.values = PcaProject(pca, act);
  out.utterance_id = feature.utterance_id;
  out.alpha_hundredths = feature.alpha_hundredths;
  return out;
}

void SpkBnModel::WriteFile(const std::string &path) const {
  params.Validate();
  NetworkFile file;
  file.kind = "mlp";
  file.meta["context"] = std::to_string(context);
  file.meta["layers"] = std::to_string(params.NumLayers());
  for (std::size_t l = 0; l < params.w.size(); ++l) {
    file.blocks.push_back(params.w[l]);
    file.blocks.push_back(params.b[l]);
  }
  WriteNetworkFile(path, file);
}

SpkBnModel SpkBnModel::ReadFile(const std::string &path) {
  NetworkFile file = ReadNetworkFile(path, "mlp");
  SpkBnModel model;
  model.context = MetaInt(file, "context");
  if (file.blocks.size() % 2 != 0 || file.blocks.empty())
    throw DataError("mlp file " + path + " has wrong block count");
  for (std::size_t i = 0; i < file.blocks.size(); i += 2) {
    if (file.blocks[i + 1].cols() != 1)
      throw DataError("mlp file " + path + " has a malformed bias block");
    model.params.w.push_back(file.blocks[i]);
    model.params.b.push_back(file.blocks[i + 1]);
  }
  model.params.Validate();
  return model;
}

}  // namespace nn
}  // namespace vsv
