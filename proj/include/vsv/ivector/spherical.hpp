// vsv/ivector/spherical.hpp

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

#ifndef VSV_IVECTOR_SPHERICAL_HPP_
#define VSV_IVECTOR_SPHERICAL_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vsv {
namespace ivector {

// Iterated whitening plus length normalization.  Each iteration stores the
// mean and inverse-square-root covariance fitted on the training vectors so
// unseen vectors replay the same steps.
struct SphericalNorm {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> transforms;

  int Iterations() const { return static_cast<int>(means.size()); }
  Eigen::Index Dim() const { return means.empty() ? 0 : means[0].size(); }

  // Runs every stored iteration: v <- W (v - m), then v <- v / |v|.
  Eigen::VectorXd Apply(const Eigen::VectorXd &v) const;
  Eigen::MatrixXd ApplyAll(const Eigen::MatrixXd &vectors) const;

  // Container magic "VSVS".
  void WriteFile(const std::string &path) const;
  static SphericalNorm ReadFile(const std::string &path);
};

// Fits on the columns of fit_set (one vector per column).  Covariance
// eigenvalues are floored at 1e-8 before inversion, with a warning.
SphericalNorm FitSphericalNorm(const Eigen::MatrixXd &fit_set,
                               int iterations = 2);

// Speaker enrollment: arithmetic mean of normalized session vectors,
// re-normalized to unit length.  Antipodal sessions cancel to zero and are
// rejected as degenerate.
Eigen::VectorXd EnrollAverage(const std::vector<Eigen::VectorXd> &ivectors);

}  // namespace ivector
}  // namespace vsv

#endif  // VSV_IVECTOR_SPHERICAL_HPP_
