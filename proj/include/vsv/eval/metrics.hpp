// vsv/eval/metrics.hpp

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

#ifndef VSV_EVAL_METRICS_HPP_
#define VSV_EVAL_METRICS_HPP_

#include <vector>

namespace vsv {
namespace eval {

// Detection metrics over two score sets.  The threshold sweep visits every
// distinct score plus one sentinel above the maximum, with
//   FAR(t) = fraction of impostor scores >= t,
//   FRR(t) = fraction of genuine scores < t,
// so the sweep always runs from (FAR 1, FRR 0) to (FAR 0, FRR 1).

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Equal error rate, linearly interpolated between adjacent operating points
// when FAR and FRR do not meet exactly.  DataError on an empty set.
EerResult ComputeEer(const std::vector<double> &genuine,
                     const std::vector<double> &impostor);

// SRE'08 core-condition cost constants.
struct DcfConfig {
  double c_miss = 10.0;
  double c_fa = 1.0;
  double p_target = 0.01;

  void Validate() const;
};

// (C_miss P_tgt P_miss + C_fa (1 - P_tgt) P_fa) / min(C_miss P_tgt,
// C_fa (1 - P_tgt)); the default constants normalize by 0.1.
double NormalizedDcf(double p_miss, double p_fa, const DcfConfig &config);

struct MinDcfResult {
  double min_dcf = 0.0;
  double threshold = 0.0;
};

// Minimum of the normalized DCF over the threshold sweep; the sentinel
// operating point costs exactly 1.0, so the minimum lies in [0, 1].
MinDcfResult ComputeMinDcf(const std::vector<double> &genuine,
                           const std::vector<double> &impostor,
                           const DcfConfig &config);

struct DetPoint {
  double p_fa = 0.0;
  double p_miss = 0.0;
};

// Operating-point staircase in ascending threshold order with consecutive
// duplicates removed; suitable for external DET plotting.
std::vector<DetPoint> DetPoints(const std::vector<double> &genuine,
                                const std::vector<double> &impostor);

}  // namespace eval
}  // namespace vsv

#endif  // VSV_EVAL_METRICS_HPP_
