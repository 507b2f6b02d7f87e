// vsv/corpus/manifest.hpp

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

#ifndef VSV_CORPUS_MANIFEST_HPP_
#define VSV_CORPUS_MANIFEST_HPP_

#include <string>
#include <vector>

namespace vsv {
namespace corpus {

// One manifest row: `utterance-id speaker-id phrase-id path`, whitespace
// separated, one per line.  Paths may be relative to the manifest's own
// directory.
struct ManifestEntry {
  std::string utterance_id;
  std::string speaker_id;
  std::string phrase_id;
  std::string path;
};

// Reads a manifest.  Empty files, short rows, empty fields and duplicate
// utterance ids raise DataError.  Relative paths are resolved against the
// manifest's directory.
std::vector<ManifestEntry> ReadManifest(const std::string &path);

void WriteManifest(const std::string &path,
                   const std::vector<ManifestEntry> &entries);

}  // namespace corpus
}  // namespace vsv

#endif  // VSV_CORPUS_MANIFEST_HPP_
