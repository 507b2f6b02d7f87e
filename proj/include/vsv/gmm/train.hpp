// vsv/gmm/train.hpp

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

#ifndef VSV_GMM_TRAIN_HPP_
#define VSV_GMM_TRAIN_HPP_

#include <cstdint>
#include <vector>

#include "vsv/gmm/diag_gmm.hpp"

namespace vsv {
namespace gmm {

// Zeroth/first/second order statistics of one E step, plus the data log
// likelihood under the accumulating model.
struct EmStats {
  Eigen::VectorXd gamma;   // K, responsibility mass
  Eigen::MatrixXd x;       // K x D, sum of gamma-weighted frames
  Eigen::MatrixXd xx;      // K x D, sum of gamma-weighted squared frames
  double loglik = 0.0;     // sum over frames of log p(x_t)
  Eigen::Index min_ll_frame = 0;  // frame with the lowest log p, for reseeds

  void Resize(Eigen::Index k, Eigen::Index d);
};

// Blocked, OpenMP-parallel accumulation.  Partials are merged in block
// order, so results do not depend on the thread count.
EmStats AccumulateEmStats(const GmmLogDensity &density,
                          const Eigen::MatrixXd &frames);

struct UbmTrainConfig {
  int num_components = 512;
  int em_iterations = 10;
  int kmeans_iterations = 5;
  std::int64_t kmeans_subsample = 100000;  // frames used for seeding
  double variance_floor_scale = 1e-3;      // times the global variance
  double empty_threshold = 1e-6;           // gamma mass that counts as empty
  std::uint64_t seed = 0;
};

struct UbmTrainResult {
  DiagonalGmm gmm;
  std::vector<double> avg_loglik;  // per EM iteration, before each update
  int reseeded = 0;                // empty components revived
};

// k-means++ seeding on a subsample, then EM with per-dimension variance
// flooring.  Needs at least 10 frames per component.
UbmTrainResult TrainUbm(const Eigen::MatrixXd &frames,
                        const UbmTrainConfig &config);

// Revives components whose responsibility mass fell below threshold: the
// mean moves to the worst-explained frame, the variance resets to the global
// variance, and the weight to 1/N before renormalization.  Returns how many
// were reseeded.  Exposed separately so the starvation path is testable.
int ReseedEmpty(DiagonalGmm *gmm, const EmStats &stats,
                const Eigen::MatrixXd &frames,
                const Eigen::VectorXd &global_var, double threshold);

struct MapConfig {
  double relevance = 10.0;
  int iterations = 3;
};

// Mean-only maximum a posteriori adaptation.  Each iteration accumulates
// stats under the current model and shrinks the data means toward the
// previous iterate, so iteration i's prior is iterate i-1 (not the UBM).
// Weights and variances stay at the UBM values.
DiagonalGmm MapAdaptMeans(const DiagonalGmm &ubm,
                          const Eigen::MatrixXd &frames,
                          const MapConfig &config);

}  // namespace gmm

namespace ref {

// Frame-at-a-time accumulation, the serial reference for the blocked kernel.
gmm::EmStats AccumulateEmStatsSerial(const gmm::DiagonalGmm &gmm,
                                     const Eigen::MatrixXd &frames);

}  // namespace ref
}  // namespace vsv

#endif  // VSV_GMM_TRAIN_HPP_
