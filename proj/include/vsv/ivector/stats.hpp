// vsv/ivector/stats.hpp

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

#ifndef VSV_IVECTOR_STATS_HPP_
#define VSV_IVECTOR_STATS_HPP_

#include <Eigen/Dense>

#include "vsv/gmm/diag_gmm.hpp"

namespace vsv {
namespace ivector {

// Sufficient statistics of one utterance against the background model.
// First-order stats are centered about the background means, so a zero f
// means the utterance sits exactly on the model.
struct BaumWelchStats {
  Eigen::VectorXd n;  // K occupancies, sum equals the frame count
  Eigen::MatrixXd f;  // K x D centered first-order stats

  Eigen::Index NumComponents() const { return n.size(); }
  Eigen::Index Dim() const { return f.cols(); }
};

BaumWelchStats AccumulateBwStats(const gmm::DiagonalGmm &ubm,
                                 const Eigen::MatrixXd &frames);

}  // namespace ivector
}  // namespace vsv

#endif  // VSV_IVECTOR_STATS_HPP_
