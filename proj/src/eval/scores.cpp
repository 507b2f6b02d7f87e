// vsv/eval/scores.cpp

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

#include "vsv/eval/scores.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "vsv/core/common.hpp"

namespace vsv {
namespace eval {

namespace {

std::string FormatScore(double score) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", score);
  return buf;
}

using TrialKey = std::pair<std::string, std::string>;

std::string KeyName(const TrialKey &key) {
  return key.first + "/" + key.second;
}

}  // namespace

void WriteScoreFile(const std::string &path, const ScoreSet &set) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  for (const auto &e : set.entries) {
    if (!std::isfinite(e.score))
      throw NumericError("score file: non-finite score for trial " +
                         KeyName({e.model_id, e.test_id}));
    os << e.model_id << ' ' << e.test_id << ' '
       << corpus::TrialTypeName(e.type) << ' ' << FormatScore(e.score)
       << '\n';
  }
  if (!os) throw DataError("failed writing score file: " + path);
}

ScoreSet ReadScoreFile(const std::string &path, const std::string &system_id) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open score file: " + path);

  ScoreSet set;
  set.system_id = system_id;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TrialScore entry;
    std::string type_name, score_text, extra;
    if (!(ls >> entry.model_id >> entry.test_id >> type_name >> score_text) ||
        (ls >> extra))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected `model-id test-id trial-type score`");
    entry.type = corpus::TrialTypeFromName(type_name);
    std::size_t consumed = 0;
    try {
      entry.score = std::stod(score_text, &consumed);
    } catch (const std::exception &) {
      consumed = 0;
    }
    if (consumed != score_text.size() || !std::isfinite(entry.score))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": bad score value `" + score_text + "`");
    set.entries.push_back(std::move(entry));
  }
  return set;
}

ScoreSet FuseScores(const std::vector<ScoreSet> &systems) {
  if (systems.empty()) throw DataError("fuse: no input systems");
  const ScoreSet &first = systems.front();
  if (first.entries.empty())
    throw DataError("fuse: system " + first.system_id + " has no scores");

  // Running per-trial sums, indexed by position in the first system.  The
  // addition order is fixed (system 0, 1, ...) so fusion is deterministic.
  std::map<TrialKey, std::size_t> index;
  for (std::size_t i = 0; i < first.entries.size(); ++i) {
    const auto &e = first.entries[i];
    if (!index.emplace(TrialKey{e.model_id, e.test_id}, i).second)
      throw DataError("fuse: duplicate trial " +
                      KeyName({e.model_id, e.test_id}) + " in system " +
                      first.system_id);
  }

  ScoreSet fused;
  fused.system_id = "fused";
  fused.entries = first.entries;
  for (std::size_t s = 1; s < systems.size(); ++s) {
    const ScoreSet &sys = systems[s];
    if (sys.entries.size() != first.entries.size())
      throw DataError("fuse: system " + sys.system_id + " has " +
                      std::to_string(sys.entries.size()) + " trials, system " +
                      first.system_id + " has " +
                      std::to_string(first.entries.size()));
    std::set<TrialKey> used;
    for (const auto &e : sys.entries) {
      TrialKey key{e.model_id, e.test_id};
      auto it = index.find(key);
      if (it == index.end())
        throw DataError("fuse: trial " + KeyName(key) + " from system " +
                        sys.system_id + " is missing in system " +
                        first.system_id);
      if (!used.insert(key).second)
        throw DataError("fuse: duplicate trial " + KeyName(key) +
                        " in system " + sys.system_id);
      TrialScore &acc = fused.entries[it->second];
      if (acc.type != e.type)
        throw DataError("fuse: trial " + KeyName(key) + " is " +
                        corpus::TrialTypeName(acc.type) + " in system " +
                        first.system_id + " but " +
                        corpus::TrialTypeName(e.type) + " in system " +
                        sys.system_id);
      acc.score += e.score;
    }
  }

  const double count = static_cast<double>(systems.size());
  for (auto &e : fused.entries) e.score /= count;
  return fused;
}

}  // namespace eval
}  // namespace vsv
