// vsv/ivector/tmatrix.hpp

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

#ifndef VSV_IVECTOR_TMATRIX_HPP_
#define VSV_IVECTOR_TMATRIX_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsv/gmm/diag_gmm.hpp"
#include "vsv/ivector/stats.hpp"

namespace vsv {
namespace ivector {

// Total-variability decomposition of the mean supervector: M = m + T w.
// Supervectors stack component rows, entry (k, d) at index k * D + d.
struct TotalVariabilityModel {
  Eigen::VectorXd m;      // K*D stacked background means
  Eigen::VectorXd sigma;  // K*D stacked background variances
  Eigen::MatrixXd t;      // (K*D) x R subspace
  Eigen::Index num_components = 0;

  Eigen::Index Dim() const {
    return num_components > 0 ? m.size() / num_components : 0;
  }
  Eigen::Index Rank() const { return t.cols(); }

  void Validate() const;

  // Container magic "VSVT".
  void WriteFile(const std::string &path) const;
  static TotalVariabilityModel ReadFile(const std::string &path);
};

struct TvTrainConfig {
  int rank = 400;
  int iterations = 10;
  double ridge = 1e-6;  // scaled by mean eigenvalue on singular solves
  std::uint64_t seed = 0;
};

struct TvTrainResult {
  TotalVariabilityModel model;
  // Variable part of the marginal log likelihood of the stats, summed over
  // utterances, evaluated before each update.  Non-decreasing under EM.
  std::vector<double> objective;
};

// EM over fixed per-utterance statistics.  The subspace starts from seeded
// Gaussian noise scaled to a hundredth of the average deviation.
TvTrainResult TrainTv(const std::vector<BaumWelchStats> &stats,
                      const gmm::DiagonalGmm &ubm, const TvTrainConfig &config);

// Posterior mean w = (I + T' Sigma^-1 N T)^-1 T' Sigma^-1 f via a symmetric
// positive definite solve.  Zero stats give a zero vector.
Eigen::VectorXd ExtractIvector(const BaumWelchStats &stats,
                               const TotalVariabilityModel &tv);

// Batch extraction, one column per utterance; the per-component Gram
// matrices are built once and utterances run in parallel.
Eigen::MatrixXd ExtractIvectors(const std::vector<BaumWelchStats> &stats,
                                const TotalVariabilityModel &tv);

}  // namespace ivector
}  // namespace vsv

#endif  // VSV_IVECTOR_TMATRIX_HPP_
