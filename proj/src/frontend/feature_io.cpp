// frontend/feature_io.cpp

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

#include "vsv/frontend/feature_io.hpp"

#include <vector>

#include "vsv/core/binary_io.hpp"

namespace vsv {
namespace frontend {

namespace {
constexpr char kMagic[5] = "VSVF";
constexpr std::uint16_t kVersion = 1;
}  // namespace

void WriteFeature(const std::string &path, const FeatureMatrix &feature) {
  auto os = io::OpenOut(path);
  io::WriteMagic(os, kMagic, kVersion);
  io::WriteScalar<std::uint32_t>(os,
                                 static_cast<std::uint32_t>(feature.Dim()));
  io::WriteScalar<std::uint32_t>(
      os, static_cast<std::uint32_t>(feature.Frames()));
  io::WriteScalar<std::int32_t>(os, feature.alpha_hundredths);
  io::WriteString(os, feature.utterance_id);

  std::vector<float> payload(
      static_cast<std::size_t>(feature.Dim() * feature.Frames()));
  std::size_t i = 0;
  for (Eigen::Index t = 0; t < feature.Frames(); ++t)
    for (Eigen::Index d = 0; d < feature.Dim(); ++d)
      payload[i++] = static_cast<float>(feature.values(d, t));
  os.write(reinterpret_cast<const char *>(payload.data()),
           static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!os) throw DataError("failed writing feature file: " + path);
}

FeatureMatrix ReadFeature(const std::string &path) {
  auto is = io::OpenIn(path);
  auto version = io::ExpectMagic(is, kMagic, "feature");
  if (version != kVersion)
    throw DataError(path + ": unsupported feature container version " +
                    std::to_string(version));
  auto dim = io::ReadScalar<std::uint32_t>(is, "feature dim");
  auto frames = io::ReadScalar<std::uint32_t>(is, "feature frames");
  auto alpha = io::ReadScalar<std::int32_t>(is, "feature warp factor");
  std::string id = io::ReadString(is, "utterance id");
  if (dim == 0 || static_cast<std::uint64_t>(dim) * frames > (1ull << 31))
    throw DataError(path + ": implausible feature dimensions");

  std::vector<float> payload(static_cast<std::size_t>(dim) * frames);
  is.read(reinterpret_cast<char *>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!is) throw DataError(path + ": truncated feature payload");

  FeatureMatrix fm;
  fm.values.resize(dim, frames);
  std::size_t i = 0;
  for (std::uint32_t t = 0; t < frames; ++t)
    for (std::uint32_t d = 0; d < dim; ++d)
      fm.values(d, t) = payload[i++];
  fm.utterance_id = std::move(id);
  fm.alpha_hundredths = alpha;
  return fm;
}

std::string FeaturePath(const std::string &dir, const std::string &utt_id) {
  return dir + "/" + utt_id + ".vsvf";
}

}  // namespace frontend
}  // namespace vsv
