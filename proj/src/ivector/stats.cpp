// ivector/stats.cpp

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

#include "vsv/ivector/stats.hpp"

#include "vsv/core/common.hpp"
#include "vsv/gmm/train.hpp"

namespace vsv {
namespace ivector {

BaumWelchStats AccumulateBwStats(const gmm::DiagonalGmm &ubm,
                                 const Eigen::MatrixXd &frames) {
  if (frames.cols() == 0) throw DataError("bw stats: no frames");
  gmm::EmStats em = gmm::AccumulateEmStats(gmm::GmmLogDensity(ubm), frames);
  BaumWelchStats stats;
  stats.n = em.gamma;
  // Centering folds the occupancy-weighted mean shift into the first-order
  // stats: f_k = sum_t gamma_t(k) (x_t - mu_k) = x_k - n_k mu_k.
  stats.f = em.x - em.gamma.asDiagonal() * ubm.means;
  return stats;
}

}  // namespace ivector
}  // namespace vsv
