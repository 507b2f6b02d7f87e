// vsv/nn/pca.hpp

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

#ifndef VSV_NN_PCA_HPP_
#define VSV_NN_PCA_HPP_

#include <string>

#include <Eigen/Dense>

namespace vsv {
namespace nn {

// Linear projection onto the leading principal directions of a training
// set: out = basis' * (x - mean).
struct PcaProjection {
  Eigen::VectorXd mean;       // input dim
  Eigen::MatrixXd basis;      // input dim x out dim, orthonormal columns
  Eigen::VectorXd explained;  // variance fraction per column, descending

  Eigen::Index InputDim() const { return basis.rows(); }
  Eigen::Index OutputDim() const { return basis.cols(); }

  // DataError on shape mismatch; NumericError when columns are not
  // orthonormal within 1e-8.
  void Validate() const;

  void WriteFile(const std::string &path) const;
  static PcaProjection ReadFile(const std::string &path);
};

// Eigendecomposition of the mean-centered covariance of `frames` (one
// column per observation), keeping the out_dim leading eigenvectors in
// descending eigenvalue order.  Sign convention: each column's
// largest-magnitude coordinate is positive.  DataError when the data has
// numerical rank below out_dim (the message states the achievable rank) or
// when frames <= out_dim.
PcaProjection FitPca(const Eigen::MatrixXd &frames, Eigen::Index out_dim);

Eigen::MatrixXd PcaProject(const PcaProjection &pca,
                           const Eigen::MatrixXd &frames);

}  // namespace nn
}  // namespace vsv

#endif  // VSV_NN_PCA_HPP_
