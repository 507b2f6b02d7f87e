// vsv/gmm/diag_gmm.hpp

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

#ifndef VSV_GMM_DIAG_GMM_HPP_
#define VSV_GMM_DIAG_GMM_HPP_

#include <string>

#include <Eigen/Dense>

namespace vsv {
namespace gmm {

// Diagonal-covariance Gaussian mixture.  Rows index components.
struct DiagonalGmm {
  Eigen::VectorXd weights;  // K
  Eigen::MatrixXd means;    // K x D
  Eigen::MatrixXd vars;     // K x D

  Eigen::Index NumComponents() const { return weights.size(); }
  Eigen::Index Dim() const { return means.cols(); }

  // Shape consistency, positive variances, weights summing to one.
  void Validate(double weight_tol = 1e-6) const;

  // Container magic "VSVG".
  void WriteFile(const std::string &path) const;
  static DiagonalGmm ReadFile(const std::string &path);
};

// Per-component log density in the affine form used by every bulk kernel:
//   log w_k N_k(x) = c_k + a_k . x + b_k . (x * x)
// where a = mu / var, b = -1 / (2 var) and c folds the weight and
// normalization.  Frame blocks then evaluate as two matrix products.
struct GmmLogDensity {
  Eigen::MatrixXd a;  // K x D
  Eigen::MatrixXd b;  // K x D
  Eigen::VectorXd c;  // K

  GmmLogDensity() = default;
  explicit GmmLogDensity(const DiagonalGmm &gmm);

  Eigen::Index NumComponents() const { return c.size(); }
  Eigen::Index Dim() const { return a.cols(); }
};

// Component log likelihoods, (K x T) for frames (D x T); parallel over frame
// blocks.  Includes the mixture weights.
Eigen::MatrixXd ComponentLogLik(const GmmLogDensity &density,
                                const Eigen::MatrixXd &frames);

// Stabilized per-frame log p(x_t) = logsumexp_k of the component rows.
Eigen::VectorXd FrameLogLik(const GmmLogDensity &density,
                            const Eigen::MatrixXd &frames);

// Mean of FrameLogLik.
double AverageLogLik(const GmmLogDensity &density,
                     const Eigen::MatrixXd &frames);

// Per-frame average log-likelihood ratio of a speaker model against the
// background model. Zero when the two models are identical.
double ScoreLlr(const GmmLogDensity &model, const GmmLogDensity &background,
                const Eigen::MatrixXd &frames);

// Column-wise logsumexp helper shared by the kernels.
Eigen::VectorXd LogSumExpColumns(const Eigen::MatrixXd &m);

}  // namespace gmm

namespace ref {

// Naive per-frame evaluation, the serial reference for the blocked kernels.
Eigen::MatrixXd ComponentLogLikSerial(const gmm::DiagonalGmm &gmm,
                                      const Eigen::MatrixXd &frames);
double AverageLogLikSerial(const gmm::DiagonalGmm &gmm,
                           const Eigen::MatrixXd &frames);

}  // namespace ref
}  // namespace vsv

#endif  // VSV_GMM_DIAG_GMM_HPP_
