// vsv/eval/metrics.cpp

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

#include "vsv/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vsv/core/common.hpp"

namespace vsv {
namespace eval {

namespace {

struct OperatingPoint {
  double threshold;
  double far;  // fraction of impostor >= threshold
  double frr;  // fraction of genuine < threshold
};

void CheckScores(const std::vector<double> &scores, const char *what) {
  if (scores.empty())
    throw DataError(std::string("metrics: empty ") + what + " score set");
  for (double s : scores)
    if (!std::isfinite(s))
      throw NumericError(std::string("metrics: non-finite ") + what +
                         " score");
}

// One operating point per distinct score, ascending, plus a sentinel above
// the maximum where FAR = 0 and FRR = 1.  Rates come from running indices
// into the two sorted arrays, so the sweep is O(n log n).
std::vector<OperatingPoint> Sweep(const std::vector<double> &genuine,
                                  const std::vector<double> &impostor) {
  CheckScores(genuine, "genuine");
  CheckScores(impostor, "impostor");
  std::vector<double> gen = genuine, imp = impostor;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());

  std::vector<double> thresholds;
  thresholds.reserve(gen.size() + imp.size() + 1);
  thresholds.insert(thresholds.end(), gen.begin(), gen.end());
  thresholds.insert(thresholds.end(), imp.begin(), imp.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(thresholds.back() + 1.0);  // sentinel above all

  const double num_gen = static_cast<double>(gen.size());
  const double num_imp = static_cast<double>(imp.size());
  std::vector<OperatingPoint> points;
  points.reserve(thresholds.size());
  std::size_t below_gen = 0;  // genuine scores < threshold
  std::size_t below_imp = 0;  // impostor scores < threshold
  for (double t : thresholds) {
    while (below_gen < gen.size() && gen[below_gen] < t) ++below_gen;
    while (below_imp < imp.size() && imp[below_imp] < t) ++below_imp;
    points.push_back(
        {t, static_cast<double>(imp.size() - below_imp) / num_imp,
         static_cast<double>(below_gen) / num_gen});
  }
  return points;
}

}  // namespace

EerResult ComputeEer(const std::vector<double> &genuine,
                     const std::vector<double> &impostor) {
  std::vector<OperatingPoint> points = Sweep(genuine, impostor);
  // FAR - FRR starts at 1 and ends at -1; find the sign change and
  // interpolate linearly inside that segment.
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double diff_a = points[i].far - points[i].frr;
    const double diff_b = points[i + 1].far - points[i + 1].frr;
    if (diff_a == 0.0) return {points[i].far, points[i].threshold};
    if (diff_a > 0.0 && diff_b < 0.0) {
      const double lambda = diff_a / (diff_a - diff_b);
      return {points[i].far + lambda * (points[i + 1].far - points[i].far),
              points[i].threshold +
                  lambda * (points[i + 1].threshold - points[i].threshold)};
    }
  }
  // Only reachable when the last point itself is the crossing.
  const OperatingPoint &last = points.back();
  return {last.far, last.threshold};
}

void DcfConfig::Validate() const {
  if (c_miss <= 0.0 || c_fa <= 0.0)
    throw ConfigError("dcf: costs must be positive");
  if (p_target <= 0.0 || p_target >= 1.0)
    throw ConfigError("dcf: target prior must lie strictly inside (0, 1)");
}

double NormalizedDcf(double p_miss, double p_fa, const DcfConfig &config) {
  config.Validate();
  const double norm =
      std::min(config.c_miss * config.p_target,
               config.c_fa * (1.0 - config.p_target));
  return (config.c_miss * config.p_target * p_miss +
          config.c_fa * (1.0 - config.p_target) * p_fa) /
         norm;
}

MinDcfResult ComputeMinDcf(const std::vector<double> &genuine,
                           const std::vector<double> &impostor,
                           const DcfConfig &config) {
  config.Validate();
  std::vector<OperatingPoint> points = Sweep(genuine, impostor);
  MinDcfResult best{NormalizedDcf(points.front().frr, points.front().far,
                                  config),
                    points.front().threshold};
  for (const OperatingPoint &point : points) {
    const double dcf = NormalizedDcf(point.frr, point.far, config);
    if (dcf < best.min_dcf) best = {dcf, point.threshold};
  }
  return best;
}

std::vector<DetPoint> DetPoints(const std::vector<double> &genuine,
                                const std::vector<double> &impostor) {
  std::vector<OperatingPoint> points = Sweep(genuine, impostor);
  std::vector<DetPoint> det;
  det.reserve(points.size());
  for (const OperatingPoint &point : points) {
    if (!det.empty() && det.back().p_fa == point.far &&
        det.back().p_miss == point.frr)
      continue;
    det.push_back({point.far, point.frr});
  }
  return det;
}

}  // namespace eval
}  // namespace vsv
