// frontend/warp.cpp

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

#include "vsv/frontend/warp.hpp"

#include <cmath>

#include "vsv/core/common.hpp"

namespace vsv {
namespace frontend {

std::vector<int> WarpGrid() {
  std::vector<int> grid;
  for (int h = kWarpGridLow; h <= kWarpGridHigh; h += kWarpGridStep)
    grid.push_back(h);
  return grid;
}

WarpConfig WarpConfig::Make(double alpha, double f_max) {
  WarpConfig config;
  config.alpha = alpha;
  config.f_max = f_max;
  config.f0_boundary = 0.85 * f_max;
  config.Validate();
  return config;
}

void WarpConfig::Validate() const {
  if (!(alpha >= AlphaFromHundredths(kWarpGridLow) &&
        alpha <= AlphaFromHundredths(kWarpGridHigh)))
    throw DataError("warp: alpha outside [0.80, 1.20]");
  if (!(f_max > 0.0)) throw DataError("warp: f_max must be positive");
  if (!(f0_boundary > 0.0 && f0_boundary < f_max))
    throw DataError("warp: boundary must lie strictly inside (0, f_max)");
}

double WarpConfig::EffectiveBoundary() const {
  if (alpha * f0_boundary > f_max) return f0_boundary / alpha;
  return f0_boundary;
}

namespace {

// Inner map shared by the checked entry point and the per-bin loop, which
// validates once and precomputes the segment parameters.
inline double WarpInner(double freq, double alpha, double f_max, double knee,
                        double slope) {
  if (freq == f_max) return f_max;
  if (freq <= knee) return alpha * freq;
  return alpha * knee + slope * (freq - knee);
}

}  // namespace

double WarpFrequency(double freq, const WarpConfig &config) {
  config.Validate();
  if (!(freq >= 0.0 && freq <= config.f_max))
    throw DataError("warp: frequency outside [0, f_max]");
  double knee = config.EffectiveBoundary();
  double slope =
      (config.f_max - config.alpha * knee) / (config.f_max - knee);
  // f_max is an exact fixed point of the map; the linear segment would only
  // reproduce it to rounding, hence the special case inside WarpInner.
  return WarpInner(freq, config.alpha, config.f_max, knee, slope);
}

std::vector<double> WarpSpectrum(const std::vector<double> &power,
                                 const WarpConfig &config) {
  config.Validate();
  if (power.size() < 2) throw DataError("warp: spectrum needs >= 2 bins");
  if (config.alpha == 1.0) return power;

  const double knee = config.EffectiveBoundary();
  const double slope =
      (config.f_max - config.alpha * knee) / (config.f_max - knee);
  const auto n = static_cast<std::int64_t>(power.size());
  const double df = config.f_max / static_cast<double>(n - 1);
  std::vector<double> warped(power.size());
  for (std::int64_t j = 0; j < n; ++j) {
    double freq = (j == n - 1) ? config.f_max : j * df;
    if (freq > config.f_max) freq = config.f_max;
    double g = WarpInner(freq, config.alpha, config.f_max, knee, slope);
    double pos = g / df;
    auto k = static_cast<std::int64_t>(pos);
    if (k > n - 2) k = n - 2;
    double frac = pos - static_cast<double>(k);
    warped[static_cast<std::size_t>(j)] =
        power[static_cast<std::size_t>(k)] +
        frac * (power[static_cast<std::size_t>(k + 1)] -
                power[static_cast<std::size_t>(k)]);
  }
  return warped;
}

}  // namespace frontend
}  // namespace vsv
