// vsv/frontend/warp.hpp

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

#ifndef VSV_FRONTEND_WARP_HPP_
#define VSV_FRONTEND_WARP_HPP_

#include <vector>

namespace vsv {
namespace frontend {

// Warp factors are carried as integer hundredths so the grid has exact,
// hashable members (0.80 is not representable in binary floating point).
constexpr int kWarpGridLow = 80;
constexpr int kWarpGridHigh = 120;
constexpr int kWarpGridStep = 2;

// The standard 21-point grid {0.80, 0.82, ..., 1.20}, in hundredths.
std::vector<int> WarpGrid();

inline double AlphaFromHundredths(int h) { return h / 100.0; }

// Piecewise-linear frequency warp.  Below the boundary frequency the axis is
// scaled by alpha; above it a linear segment carries the boundary's image up
// to f_max, which stays fixed.  For alpha large enough that the scaled
// boundary would leave the band (alpha * f0 > f_max), the boundary is pulled
// in to f0 / alpha, which keeps the map strictly increasing and its range
// exactly [0, f_max] over the whole supported alpha range.
struct WarpConfig {
  double alpha = 1.0;
  double f_max = 8000.0;
  double f0_boundary = 6800.0;

  // f0 defaults to 85% of f_max.
  static WarpConfig Make(double alpha, double f_max);
  void Validate() const;

  // The boundary actually used, after the range-preserving adjustment.
  double EffectiveBoundary() const;
};

// Maps one frequency.  Input outside [0, f_max] raises DataError.
double WarpFrequency(double freq, const WarpConfig &config);

// Resamples a power spectrum S(f) to S(warp(f)) by linear interpolation.
// Bins are assumed uniform over [0, f_max] with bin 0 at DC and the last bin
// at f_max.  alpha == 1 returns the input unchanged.
std::vector<double> WarpSpectrum(const std::vector<double> &power,
                                 const WarpConfig &config);

}  // namespace frontend
}  // namespace vsv

#endif  // VSV_FRONTEND_WARP_HPP_
