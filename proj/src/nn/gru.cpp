// vsv/nn/gru.cpp

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

#include "vsv/nn/gru.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vsv/core/common.hpp"
#include "vsv/core/rng.hpp"
#include "vsv/nn/nn_io.hpp"

namespace vsv {
namespace nn {

namespace {

Eigen::VectorXd SigmoidV(const Eigen::VectorXd &z) {
  return ((-z.array()).exp() + 1.0).inverse().matrix();
}

// Per-layer forward cache kept for backpropagation through time.
struct LayerCache {
  Eigen::MatrixXd x;  // layer input sequence, I x T
  Eigen::MatrixXd z, r, c, h;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Eigen::MatrixXd predictions;
};

ForwardCache RunForward(const GruParams &params, const Eigen::MatrixXd &seq) {
  if (seq.rows() != params.InputDim())
    throw DataError("gru: input dimension " + std::to_string(seq.rows()) +
                    " does not match network input " +
                    std::to_string(params.InputDim()));
  const Eigen::Index frames = seq.cols();
  const Eigen::Index hidden = params.HiddenDim();
  ForwardCache cache;
  cache.layers.resize(params.layers.size());
  Eigen::MatrixXd input = seq;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const GruLayer &p = params.layers[l];
    LayerCache &lc = cache.layers[l];
    lc.x = input;
    lc.z.resize(hidden, frames);
    lc.r.resize(hidden, frames);
    lc.c.resize(hidden, frames);
    lc.h.resize(hidden, frames);
    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(hidden);
    for (Eigen::Index t = 0; t < frames; ++t) {
      const Eigen::VectorXd x_t = lc.x.col(t);
      Eigen::VectorXd z_t = SigmoidV(p.wz * x_t + p.uz * h_prev + p.bz);
      Eigen::VectorXd r_t = SigmoidV(p.wr * x_t + p.ur * h_prev + p.br);
      Eigen::VectorXd c_t =
          (p.wh * x_t + p.uh * (r_t.cwiseProduct(h_prev)) + p.bh)
              .array()
              .tanh()
              .matrix();
      Eigen::VectorXd h_t = (1.0 - z_t.array()).matrix().cwiseProduct(h_prev) +
                            z_t.cwiseProduct(c_t);
      lc.z.col(t) = z_t;
      lc.r.col(t) = r_t;
      lc.c.col(t) = c_t;
      lc.h.col(t) = h_t;
      h_prev = std::move(h_t);
    }
    input = lc.h.cwiseMax(0.0);  // ReLU output feeds the next layer
  }
  cache.predictions = (params.head_w * input).colwise() + params.head_b;
  return cache;
}

GruGradients ZeroGradients(const GruParams &params) {
  GruGradients g;
  g.layers.resize(params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const GruLayer &p = params.layers[l];
    GruLayer &gl = g.layers[l];
    gl.wz = Eigen::MatrixXd::Zero(p.wz.rows(), p.wz.cols());
    gl.uz = Eigen::MatrixXd::Zero(p.uz.rows(), p.uz.cols());
    gl.wr = Eigen::MatrixXd::Zero(p.wr.rows(), p.wr.cols());
    gl.ur = Eigen::MatrixXd::Zero(p.ur.rows(), p.ur.cols());
    gl.wh = Eigen::MatrixXd::Zero(p.wh.rows(), p.wh.cols());
    gl.uh = Eigen::MatrixXd::Zero(p.uh.rows(), p.uh.cols());
    gl.bz = Eigen::VectorXd::Zero(p.bz.size());
    gl.br = Eigen::VectorXd::Zero(p.br.size());
    gl.bh = Eigen::VectorXd::Zero(p.bh.size());
  }
  g.head_w = Eigen::MatrixXd::Zero(params.head_w.rows(), params.head_w.cols());
  g.head_b = Eigen::VectorXd::Zero(params.head_b.size());
  return g;
}

void AccumulateScaled(const GruGradients &from, double scale,
                      GruGradients *into) {
  for (std::size_t l = 0; l < from.layers.size(); ++l) {
    into->layers[l].wz += scale * from.layers[l].wz;
    into->layers[l].uz += scale * from.layers[l].uz;
    into->layers[l].wr += scale * from.layers[l].wr;
    into->layers[l].ur += scale * from.layers[l].ur;
    into->layers[l].wh += scale * from.layers[l].wh;
    into->layers[l].uh += scale * from.layers[l].uh;
    into->layers[l].bz += scale * from.layers[l].bz;
    into->layers[l].br += scale * from.layers[l].br;
    into->layers[l].bh += scale * from.layers[l].bh;
  }
  into->head_w += scale * from.head_w;
  into->head_b += scale * from.head_b;
}

void ApplyUpdate(const GruGradients &g, double step, GruParams *params) {
  for (std::size_t l = 0; l < g.layers.size(); ++l) {
    params->layers[l].wz -= step * g.layers[l].wz;
    params->layers[l].uz -= step * g.layers[l].uz;
    params->layers[l].wr -= step * g.layers[l].wr;
    params->layers[l].ur -= step * g.layers[l].ur;
    params->layers[l].wh -= step * g.layers[l].wh;
    params->layers[l].uh -= step * g.layers[l].uh;
    params->layers[l].bz -= step * g.layers[l].bz;
    params->layers[l].br -= step * g.layers[l].br;
    params->layers[l].bh -= step * g.layers[l].bh;
  }
  params->head_w -= step * g.head_w;
  params->head_b -= step * g.head_b;
}

// Backpropagation through time given d(loss)/d(predictions).
void RunBackward(const GruParams &params, const ForwardCache &cache,
                 const Eigen::MatrixXd &d_pred, GruGradients *grads) {
  const Eigen::Index frames = d_pred.cols();
  *grads = ZeroGradients(params);

  const Eigen::MatrixXd &top =
      cache.layers.back().h.cwiseMax(0.0);  // last ReLU output
  grads->head_w = d_pred * top.transpose();
  grads->head_b = d_pred.rowwise().sum();

  // d(loss)/d(this layer's ReLU output sequence).
  Eigen::MatrixXd d_out = params.head_w.transpose() * d_pred;

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const GruLayer &p = params.layers[l];
    const LayerCache &lc = cache.layers[l];
    GruLayer &g = grads->layers[l];
    Eigen::MatrixXd d_input =
        Eigen::MatrixXd::Zero(lc.x.rows(), lc.x.cols());
    Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(params.HiddenDim());
    for (Eigen::Index t = frames - 1; t >= 0; --t) {
      // ReLU: out = max(0, h), subgradient 0 at h = 0.
      Eigen::VectorXd relu_mask =
          (lc.h.col(t).array() > 0.0).cast<double>().matrix();
      Eigen::VectorXd dh = dh_carry + d_out.col(t).cwiseProduct(relu_mask);
      const Eigen::VectorXd h_prev =
          t > 0 ? Eigen::VectorXd(lc.h.col(t - 1))
                : Eigen::VectorXd(Eigen::VectorXd::Zero(params.HiddenDim()));
      const Eigen::VectorXd z_t = lc.z.col(t);
      const Eigen::VectorXd r_t = lc.r.col(t);
      const Eigen::VectorXd c_t = lc.c.col(t);

      // h = (1 - z).h_prev + z.c
      Eigen::VectorXd dz = dh.cwiseProduct(c_t - h_prev);
      Eigen::VectorXd dc = dh.cwiseProduct(z_t);
      Eigen::VectorXd dh_prev =
          dh.cwiseProduct((1.0 - z_t.array()).matrix());

      // c = tanh(wh x + uh (r.h_prev) + bh)
      Eigen::VectorXd dc_pre =
          dc.cwiseProduct((1.0 - c_t.array().square()).matrix());
      g.wh += dc_pre * lc.x.col(t).transpose();
      g.uh += dc_pre * (r_t.cwiseProduct(h_prev)).transpose();
      g.bh += dc_pre;
      Eigen::VectorXd d_rh = p.uh.transpose() * dc_pre;
      Eigen::VectorXd dr = d_rh.cwiseProduct(h_prev);
      dh_prev += d_rh.cwiseProduct(r_t);

      // Gate pre-activations through the sigmoid derivative.
      Eigen::VectorXd dz_pre =
          dz.cwiseProduct(z_t.cwiseProduct((1.0 - z_t.array()).matrix()));
      Eigen::VectorXd dr_pre =
          dr.cwiseProduct(r_t.cwiseProduct((1.0 - r_t.array()).matrix()));
      g.wz += dz_pre * lc.x.col(t).transpose();
      g.uz += dz_pre * h_prev.transpose();
      g.bz += dz_pre;
      g.wr += dr_pre * lc.x.col(t).transpose();
      g.ur += dr_pre * h_prev.transpose();
      g.br += dr_pre;
      dh_prev += p.uz.transpose() * dz_pre + p.ur.transpose() * dr_pre;

      d_input.col(t) = p.wz.transpose() * dz_pre + p.wr.transpose() * dr_pre +
                       p.wh.transpose() * dc_pre;
      dh_carry = std::move(dh_prev);
    }
    d_out = std::move(d_input);
  }
}

}  // namespace

void GruParams::Validate() const {
  if (layers.empty()) throw DataError("gru: no layers");
  const Eigen::Index hidden = HiddenDim();
  Eigen::Index in = InputDim();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const GruLayer &p = layers[l];
    const std::string where = " at layer " + std::to_string(l);
    auto gate_ok = [&](const Eigen::MatrixXd &w, const Eigen::MatrixXd &u,
                       const Eigen::VectorXd &b) {
      return w.rows() == hidden && w.cols() == in && u.rows() == hidden &&
             u.cols() == hidden && b.size() == hidden;
    };
    if (!gate_ok(p.wz, p.uz, p.bz) || !gate_ok(p.wr, p.ur, p.br) ||
        !gate_ok(p.wh, p.uh, p.bh))
      throw DataError("gru: gate shapes do not chain" + where);
    if (!p.wz.allFinite() || !p.uz.allFinite() || !p.bz.allFinite() ||
        !p.wr.allFinite() || !p.ur.allFinite() || !p.br.allFinite() ||
        !p.wh.allFinite() || !p.uh.allFinite() || !p.bh.allFinite())
      throw NumericError("gru: non-finite parameters" + where);
    in = hidden;  // next layer consumes the ReLU output
  }
  if (head_w.cols() != hidden || head_b.size() != head_w.rows())
    throw DataError("gru: head shape does not match hidden dimension");
  if (!head_w.allFinite() || !head_b.allFinite())
    throw NumericError("gru: non-finite head parameters");
}

GruParams InitGru(Eigen::Index input_dim, Eigen::Index hidden_dim, int layers,
                  Eigen::Index output_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || layers < 1 || output_dim < 1)
    throw DataError("gru: non-positive layer dimensions");
  Rng rng(Rng::Mix(seed, Rng::HashBytes("gru-init")));
  auto gaussian = [&rng](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.Normal();
    return m;
  };
  GruParams params;
  Eigen::Index in = input_dim;
  for (int l = 0; l < layers; ++l) {
    GruLayer layer;
    layer.wz = gaussian(hidden_dim, in);
    layer.uz = gaussian(hidden_dim, hidden_dim);
    layer.bz = Eigen::VectorXd::Zero(hidden_dim);
    layer.wr = gaussian(hidden_dim, in);
    layer.ur = gaussian(hidden_dim, hidden_dim);
    layer.br = Eigen::VectorXd::Zero(hidden_dim);
    layer.wh = gaussian(hidden_dim, in);
    layer.uh = gaussian(hidden_dim, hidden_dim);
    layer.bh = Eigen::VectorXd::Zero(hidden_dim);
    params.layers.push_back(std::move(layer));
    in = hidden_dim;
  }
  // Zero head: the untrained model predicts the zero sequence, which pins
  // the initial loss at sum |x_{i+shift}|.
  params.head_w = Eigen::MatrixXd::Zero(output_dim, hidden_dim);
  params.head_b = Eigen::VectorXd::Zero(output_dim);
  return params;
}

GruForwardResult GruForward(const GruParams &params,
                            const Eigen::MatrixXd &seq) {
  ForwardCache cache = RunForward(params, seq);
  GruForwardResult result;
  result.outputs.reserve(cache.layers.size());
  for (const auto &lc : cache.layers)
    result.outputs.push_back(lc.h.cwiseMax(0.0));
  result.predictions = std::move(cache.predictions);
  return result;
}

double ApcLossAndGrad(const GruParams &params, const Eigen::MatrixXd &seq,
                      int shift, Eigen::Index valid_len, GruGradients *grads,
                      Eigen::Index *num_terms) {
  if (shift < 1) throw DataError("apc: shift must be at least 1");
  const Eigen::Index frames = seq.cols();
  if (valid_len < 0 || valid_len > frames)
    throw DataError("apc: valid length out of range");
  ForwardCache cache = RunForward(params, seq);

  Eigen::MatrixXd d_pred =
      Eigen::MatrixXd::Zero(cache.predictions.rows(), frames);
  double loss = 0.0;
  Eigen::Index terms = 0;
  for (Eigen::Index i = 0; i + shift < valid_len; ++i) {
    // Scalar accumulation in a fixed order: the per-position L1 norm first,
    // then the sum over positions, so the zero-predictor identity holds
    // bitwise.
    double norm1 = 0.0;
    for (Eigen::Index d = 0; d < seq.rows(); ++d) {
      const double residual = cache.predictions(d, i) - seq(d, i + shift);
      norm1 += std::abs(residual);
      d_pred(d, i) = residual > 0.0 ? 1.0 : (residual < 0.0 ? -1.0 : 0.0);
    }
    loss += norm1;
    ++terms;
  }
  if (num_terms != nullptr) *num_terms = terms;
  if (grads != nullptr) RunBackward(params, cache, d_pred, grads);
  return loss;
}

double ApcSequenceLoss(const GruParams &params, const Eigen::MatrixXd &seq,
                       int shift) {
  return ApcLossAndGrad(params, seq, shift, seq.cols(), nullptr, nullptr);
}

void ApcTrainConfig::Validate() const {
  if (layers < 1 || hidden < 1)
    throw ConfigError("apc: non-positive network shape");
  if (shift < 1) throw ConfigError("apc: shift must be at least 1");
  if (epochs < 1) throw ConfigError("apc: epochs must be positive");
  if (batch_size < 1) throw ConfigError("apc: batch size must be positive");
  if (crop_length <= shift)
    throw ConfigError("apc: crop length must exceed the prediction shift");
  if (learning_rate <= 0.0)
    throw ConfigError("apc: learning rate must be positive");
}

ApcModel TrainApc(const std::vector<Eigen::MatrixXd> &features,
                  const ApcTrainConfig &config) {
  config.Validate();
  if (features.empty()) throw DataError("apc: no training utterances");
  const Eigen::Index dim = features.front().rows();

  // A crop only contributes when it contains at least one position with a
  // target inside the unpadded region.
  struct Crop {
    std::size_t utt;
    Eigen::Index start;
  };
  std::vector<Crop> crops;
  std::size_t skipped = 0;
  for (std::size_t u = 0; u < features.size(); ++u) {
    if (features[u].rows() != dim)
      throw DataError("apc: inconsistent feature dimensions");
    const Eigen::Index frames = features[u].cols();
    if (frames <= config.shift) {
      ++skipped;
      continue;
    }
    for (Eigen::Index start = 0; start + config.shift < frames;
         start += config.crop_length)
      crops.push_back({u, start});
  }
  if (crops.empty())
    throw DataError("apc: every utterance is shorter than shift + 1 = " +
                    std::to_string(config.shift + 1) + " frames");
  if (skipped > 0)
    logging::Warn("apc: skipped " + std::to_string(skipped) +
                  " utterances shorter than shift + 1 frames");

  ApcModel model;
  model.params = InitGru(dim, config.hidden, config.layers, dim, config.seed);

  // The zero head makes this the zero-predictor loss.
  double init_sum = 0.0;
  Eigen::Index init_terms = 0;
  for (const auto &utt : features) {
    if (utt.cols() <= config.shift) continue;
    init_sum += ApcSequenceLoss(model.params, utt, config.shift);
    init_terms += utt.cols() - config.shift;
  }
  model.initial_loss = init_sum / static_cast<double>(init_terms);

  Rng rng(Rng::Mix(config.seed, Rng::HashBytes("apc-train")));
  auto padded_crop = [&](const Crop &crop, Eigen::Index *valid_len) {
    const Eigen::MatrixXd &utt = features[crop.utt];
    const Eigen::Index avail =
        std::min<Eigen::Index>(config.crop_length, utt.cols() - crop.start);
    Eigen::MatrixXd seq = Eigen::MatrixXd::Zero(dim, config.crop_length);
    seq.leftCols(avail) = utt.middleCols(crop.start, avail);
    *valid_len = avail;
    return seq;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(&crops);
    double epoch_sum = 0.0;
    Eigen::Index epoch_terms = 0;
    for (std::size_t begin = 0; begin < crops.size();
         begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(crops.size(),
                   begin + static_cast<std::size_t>(config.batch_size));
      GruGradients total = ZeroGradients(model.params);
      GruGradients grads;
      Eigen::Index batch_terms = 0;
      for (std::size_t i = begin; i < end; ++i) {
        Eigen::Index valid_len = 0;
        Eigen::MatrixXd seq = padded_crop(crops[i], &valid_len);
        Eigen::Index terms = 0;
        const double loss = ApcLossAndGrad(model.params, seq, config.shift,
                                           valid_len, &grads, &terms);
        AccumulateScaled(grads, 1.0, &total);
        epoch_sum += loss;
        batch_terms += terms;
      }
      epoch_terms += batch_terms;
      if (batch_terms > 0)
        ApplyUpdate(total,
                    config.learning_rate / static_cast<double>(batch_terms),
                    &model.params);
    }
    model.epoch_loss.push_back(epoch_sum / static_cast<double>(epoch_terms));
  }
  return model;
}

Eigen::MatrixXd GruTapActivations(const GruParams &params,
                                  const Eigen::MatrixXd &seq) {
  return GruForward(params, seq).outputs.back();
}

FeatureMatrix ExtractApcBn(const FeatureMatrix &feature,
                           const GruParams &params,
                           const PcaProjection &pca) {
  Eigen::MatrixXd act = GruTapActivations(params, feature.values);
  FeatureMatrix out;
  out.values = PcaProject(pca, act);
  out.utterance_id = feature.utterance_id;
  out.alpha_hundredths = feature.alpha_hundredths;
  return out;
}

void GruParams::WriteFile(const std::string &path) const {
  Validate();
  NetworkFile file;
  file.kind = "gru";
  file.meta["layers"] = std::to_string(NumLayers());
  file.meta["hidden"] = std::to_string(HiddenDim());
  for (const auto &layer : layers) {
    file.blocks.push_back(layer.wz);
    file.blocks.push_back(layer.uz);
    file.blocks.push_back(layer.bz);
    file.blocks.push_back(layer.wr);
    file.blocks.push_back(layer.ur);
    file.blocks.push_back(layer.br);
    file.blocks.push_back(layer.wh);
    file.blocks.push_back(layer.uh);
    file.blocks.push_back(layer.bh);
  }
  file.blocks.push_back(head_w);
  file.blocks.push_back(head_b);
  WriteNetworkFile(path, file);
}

GruParams GruParams::ReadFile(const std::string &path) {
  NetworkFile file = ReadNetworkFile(path, "gru");
  const int num_layers = MetaInt(file, "layers");
  if (num_layers < 1 ||
      file.blocks.size() != static_cast<std::size_t>(num_layers) * 9 + 2)
    throw DataError("gru file " + path + " has wrong block count");
  GruParams params;
  std::size_t at = 0;
  auto vec = [&](const Eigen::MatrixXd &m) {
    if (m.cols() != 1)
      throw DataError("gru file " + path + " has a malformed bias block");
    return Eigen::VectorXd(m);
  };
  for (int l = 0; l < num_layers; ++l) {
    GruLayer layer;
    layer.wz = file.blocks[at++];
    layer.uz = file.blocks[at++];
    layer.bz = vec(file.blocks[at++]);
    layer.wr = file.blocks[at++];
    layer.ur = file.blocks[at++];
    layer.br = vec(file.blocks[at++]);
    layer.wh = file.blocks[at++];
    layer.uh = file.blocks[at++];
    layer.bh = vec(file.blocks[at++]);
    params.layers.push_back(std::move(layer));
  }
  params.head_w = file.blocks[at++];
  params.head_b = vec(file.blocks[at++]);
  params.Validate();
  return params;
}

}  // namespace nn
}  // namespace vsv
