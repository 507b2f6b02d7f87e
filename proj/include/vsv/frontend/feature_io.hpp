// vsv/frontend/feature_io.hpp

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

#ifndef VSV_FRONTEND_FEATURE_IO_HPP_
#define VSV_FRONTEND_FEATURE_IO_HPP_

#include <string>

#include "vsv/frontend/frontend.hpp"

namespace vsv {
namespace frontend {

// Feature container, magic "VSVF": little-endian header (u16 version,
// u32 dim, u32 frames, i32 warp factor in hundredths, length-prefixed
// utterance id) followed by the matrix as f32, frame-major (frame 0's dim
// values, then frame 1's, ...).
void WriteFeature(const std::string &path, const FeatureMatrix &feature);
FeatureMatrix ReadFeature(const std::string &path);

// <dir>/<utterance-id>.vsvf
std::string FeaturePath(const std::string &dir, const std::string &utt_id);

}  // namespace frontend
}  // namespace vsv

#endif  // VSV_FRONTEND_FEATURE_IO_HPP_
