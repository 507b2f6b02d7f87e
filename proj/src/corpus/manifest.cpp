// corpus/manifest.cpp

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

#include "vsv/corpus/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "vsv/core/common.hpp"

namespace vsv {
namespace corpus {

std::vector<ManifestEntry> ReadManifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest: " + path);
  std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::vector<ManifestEntry> entries;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ManifestEntry e;
    std::string extra;
    if (!(ls >> e.utterance_id >> e.speaker_id >> e.phrase_id >> e.path) ||
        (ls >> extra)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": manifest rows need exactly 4 fields");
    }
    if (!seen_ids.insert(e.utterance_id).second)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": duplicate utterance id " + e.utterance_id);
    std::filesystem::path p(e.path);
    if (p.is_relative()) e.path = (base / p).string();
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw DataError("empty manifest: " + path);
  return entries;
}

void WriteManifest(const std::string &path,
                   const std::vector<ManifestEntry> &entries) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  for (const auto &e : entries) {
    os << e.utterance_id << ' ' << e.speaker_id << ' ' << e.phrase_id << ' '
       << e.path << '\n';
  }
  if (!os) throw DataError("failed writing manifest: " + path);
}

}  // namespace corpus
}  // namespace vsv
