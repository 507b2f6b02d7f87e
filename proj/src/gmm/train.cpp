// gmm/train.cpp

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

#include "vsv/gmm/train.hpp"

#include <cmath>
#include <numeric>

#include "vsv/core/common.hpp"
#include "vsv/core/parallel.hpp"
#include "vsv/core/rng.hpp"

namespace vsv {
namespace gmm {

void EmStats::Resize(Eigen::Index k, Eigen::Index d) {
  gamma = Eigen::VectorXd::Zero(k);
  x = Eigen::MatrixXd::Zero(k, d);
  xx = Eigen::MatrixXd::Zero(k, d);
  loglik = 0.0;
  min_ll_frame = 0;
}

EmStats AccumulateEmStats(const GmmLogDensity &density,
                          const Eigen::MatrixXd &frames) {
  if (frames.rows() != density.Dim())
    throw DataError("em: frame dim does not match model dim");
  const auto t = frames.cols();
  if (t == 0) throw DataError("em: no frames");

  par::Blocks blocks = par::FixedBlocks(t, 2048);
  std::vector<EmStats> partials(static_cast<std::size_t>(blocks.count));
  std::vector<double> partial_min(static_cast<std::size_t>(blocks.count));

  par::For(blocks.count, [&](std::int64_t bi) {
    auto begin = blocks.Begin(bi);
    auto len = blocks.End(bi) - begin;
    auto &p = partials[static_cast<std::size_t>(bi)];
    p.Resize(density.NumComponents(), density.Dim());
    if (len <= 0) {
      partial_min[static_cast<std::size_t>(bi)] =
          std::numeric_limits<double>::infinity();
      return;
    }
    const auto x = frames.middleCols(begin, len);
    Eigen::MatrixXd xsq = x.cwiseProduct(x);
    Eigen::MatrixXd loglik =
        (density.a * x + density.b * xsq).colwise() + density.c;

    Eigen::VectorXd lse = LogSumExpColumns(loglik);
    // exp(loglik - lse) columnwise: responsibilities.
    Eigen::MatrixXd resp =
        (loglik.rowwise() - lse.transpose()).array().exp().matrix();

    p.gamma = resp.rowwise().sum();
    p.x = resp * x.transpose();
    p.xx = resp * xsq.transpose();
    p.loglik = lse.sum();
    Eigen::Index local_min = 0;
    lse.minCoeff(&local_min);
    p.min_ll_frame = begin + local_min;
    partial_min[static_cast<std::size_t>(bi)] = lse(local_min);
  });

  EmStats total;
  total.Resize(density.NumComponents(), density.Dim());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t bi = 0; bi < partials.size(); ++bi) {
    total.gamma += partials[bi].gamma;
    total.x += partials[bi].x;
    total.xx += partials[bi].xx;
    total.loglik += partials[bi].loglik;
    if (partial_min[bi] < best) {
      best = partial_min[bi];
      total.min_ll_frame = partials[bi].min_ll_frame;
    }
  }
  return total;
}

namespace {

Eigen::VectorXd GlobalVariance(const Eigen::MatrixXd &frames) {
  Eigen::VectorXd mean = frames.rowwise().mean();
  Eigen::VectorXd var =
      (frames.colwise() - mean).array().square().rowwise().mean().matrix();
  return var;
}

// k-means++ seeding followed by a few Lloyd iterations, all on a subsample.
Eigen::MatrixXd KmeansCenters(const Eigen::MatrixXd &sample, int k,
                              int lloyd_iterations, Rng *rng) {
  const auto d = sample.rows();
  const auto m = sample.cols();
  Eigen::MatrixXd centers(k, d);

  // Seeding: each next center is drawn proportionally to the squared
  // distance from the chosen set.
  Eigen::VectorXd dist2 =
      Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  Eigen::Index first = rng->UniformInt(m);
  centers.row(0) = sample.col(first).transpose();
  for (int c = 1; c < k; ++c) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double dd = (sample.col(i).transpose() - centers.row(c - 1))
                      .squaredNorm();
      if (dd < dist2(i)) dist2(i) = dd;
    }
    double total = dist2.sum();
    Eigen::Index pick;
    if (total > 0.0) {
      double u = rng->Uniform() * total;
      double acc = 0.0;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        acc += dist2(i);
        if (acc >= u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng->UniformInt(m);
    }
    centers.row(c) = sample.col(pick).transpose();
  }

  // Lloyd refinement; empty clusters keep their previous center.
  Eigen::VectorXd center_sq(k);
  std::vector<int> assign(static_cast<std::size_t>(m));
  for (int it = 0; it < lloyd_iterations; ++it) {
    for (int c = 0; c < k; ++c) center_sq(c) = centers.row(c).squaredNorm();
    Eigen::MatrixXd cross = centers * sample;  // K x M
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index best = 0;
      (center_sq - 2.0 * cross.col(i)).minCoeff(&best);
      assign[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < m; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) +=
          sample.col(i).transpose();
      counts(assign[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (int c = 0; c < k; ++c)
      if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
  }
  return centers;
}

}  // namespace

int ReseedEmpty(DiagonalGmm *gmm, const EmStats &stats,
                const Eigen::MatrixXd &frames,
                const Eigen::VectorXd &global_var, double threshold) {
  int reseeded = 0;
  const auto t = frames.cols();
  for (Eigen::Index k = 0; k < gmm->NumComponents(); ++k) {
    if (stats.gamma(k) > threshold) continue;
    gmm->means.row(k) = frames.col(stats.min_ll_frame).transpose();
    gmm->vars.row(k) = global_var.transpose();
    gmm->weights(k) = 1.0 / static_cast<double>(t);
    ++reseeded;
  }
  if (reseeded > 0) {
    gmm->weights /= gmm->weights.sum();
    logging::Warn("em: reseeded " + std::to_string(reseeded) +
                  " empty component(s)");
  }
  return reseeded;
}

UbmTrainResult TrainUbm(const Eigen::MatrixXd &frames,
                        const UbmTrainConfig &config) {
  const auto d = frames.rows();
  const auto n = frames.cols();
  const int k = config.num_components;
  if (k < 1) throw ConfigError("ubm: need at least one component");
  if (n < 10 * static_cast<Eigen::Index>(k))
    throw DataError("ubm: need at least 10 frames per component, got " +
                    std::to_string(n) + " for " + std::to_string(k));
  if (config.em_iterations < 1)
    throw ConfigError("ubm: need at least one EM iteration");

  Rng rng(Rng::Mix(config.seed, Rng::HashBytes("ubm-init")));
  Eigen::VectorXd global_var = GlobalVariance(frames);
  // A hard floor keeps the floor itself positive for constant dimensions.
  Eigen::VectorXd var_floor =
      (config.variance_floor_scale * global_var.array()).max(1e-10).matrix();

  // Seed on a subsample to keep k-means cheap on big corpora.
  std::int64_t m = std::min<std::int64_t>(n, config.kmeans_subsample);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  rng.Shuffle(&idx);
  Eigen::MatrixXd sample(d, m);
  for (std::int64_t i = 0; i < m; ++i)
    sample.col(i) = frames.col(idx[static_cast<std::size_t>(i)]);

  DiagonalGmm gmm;
  gmm.means = KmeansCenters(sample, k, config.kmeans_iterations, &rng);
  gmm.vars = global_var.transpose().replicate(k, 1).cwiseMax(
      var_floor.transpose().replicate(k, 1));
  gmm.weights = Eigen::VectorXd::Constant(k, 1.0 / k);

  UbmTrainResult result;
  for (int it = 0; it < config.em_iterations; ++it) {
    GmmLogDensity density(gmm);
    EmStats stats = AccumulateEmStats(density, frames);
    result.avg_loglik.push_back(stats.loglik / static_cast<double>(n));

    for (Eigen::Index c = 0; c < k; ++c) {
      if (stats.gamma(c) <= config.empty_threshold) continue;
      double g = stats.gamma(c);
      gmm.weights(c) = g / static_cast<double>(n);
      Eigen::RowVectorXd mean = stats.x.row(c) / g;
      gmm.means.row(c) = mean;
      gmm.vars.row(c) =
          (stats.xx.row(c) / g - mean.cwiseProduct(mean))
              .cwiseMax(var_floor.transpose());
    }
    result.reseeded +=
        ReseedEmpty(&gmm, stats, frames, global_var, config.empty_threshold);
    gmm.weights /= gmm.weights.sum();
  }

  gmm.Validate();
  result.gmm = std::move(gmm);
  return result;
}

DiagonalGmm MapAdaptMeans(const DiagonalGmm &ubm,
                          const Eigen::MatrixXd &frames,
                          const MapConfig &config) {
  ubm.Validate();
  if (frames.cols() == 0) throw DataError("map: no adaptation frames");
  if (frames.rows() != ubm.Dim())
    throw DataError("map: frame dim does not match model dim");
  if (config.relevance < 0.0) throw ConfigError("map: negative relevance");
  if (config.iterations < 1) throw ConfigError("map: iterations < 1");

  DiagonalGmm adapted = ubm;
  for (int it = 0; it < config.iterations; ++it) {
    GmmLogDensity density(adapted);
    EmStats stats = AccumulateEmStats(density, frames);
    for (Eigen::Index k = 0; k < adapted.NumComponents(); ++k) {
      double g = stats.gamma(k);
      if (g <= 0.0) continue;  // no evidence, the prior mean stands
      Eigen::RowVectorXd data_mean = stats.x.row(k) / g;
      adapted.means.row(k) = (g * data_mean + config.relevance *
                              adapted.means.row(k)) /
                             (g + config.relevance);
    }
  }
  return adapted;
}

}  // namespace gmm

namespace ref {

gmm::EmStats AccumulateEmStatsSerial(const gmm::DiagonalGmm &model,
                                     const Eigen::MatrixXd &frames) {
  const auto k = model.NumComponents();
  const auto d = model.Dim();
  gmm::EmStats stats;
  stats.Resize(k, d);
  double worst = std::numeric_limits<double>::infinity();

  Eigen::MatrixXd loglik = ComponentLogLikSerial(model, frames);
  for (Eigen::Index t = 0; t < frames.cols(); ++t) {
    double mx = loglik.col(t).maxCoeff();
    double lse = mx + std::log((loglik.col(t).array() - mx).exp().sum());
    stats.loglik += lse;
    if (lse < worst) {
      worst = lse;
      stats.min_ll_frame = t;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      double r = std::exp(loglik(c, t) - lse);
      stats.gamma(c) += r;
      stats.x.row(c) += r * frames.col(t).transpose();
      stats.xx.row(c) +=
          r * frames.col(t).cwiseProduct(frames.col(t)).transpose();
    }
  }
  return stats;
}

}  // namespace ref
}  // namespace vsv
