// corpus/trials.cpp

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

#include "vsv/corpus/trials.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vsv/core/common.hpp"

namespace vsv {
namespace corpus {

const char *TrialTypeName(TrialType type) {
  switch (type) {
    case TrialType::kGenuine:
      return "genuine";
    case TrialType::kTargetWrong:
      return "target-wrong";
    case TrialType::kImposterCorrect:
      return "imposter-correct";
    case TrialType::kImposterWrong:
      return "imposter-wrong";
  }
  throw DataError("invalid trial type value");
}

TrialType TrialTypeFromName(const std::string &name) {
  for (int i = 0; i < kNumTrialTypes; ++i) {
    auto t = static_cast<TrialType>(i);
    if (name == TrialTypeName(t)) return t;
  }
  throw DataError("unknown trial type: " + name);
}

bool IsTarget(TrialType type) { return type == TrialType::kGenuine; }

std::array<std::int64_t, kNumTrialTypes> TrialSet::CountByType() const {
  std::array<std::int64_t, kNumTrialTypes> counts{};
  for (const auto &t : trials) counts[static_cast<int>(t.type)]++;
  return counts;
}

TrialSet BuildTrials(const std::vector<ManifestEntry> &enroll,
                     const std::vector<ManifestEntry> &test) {
  if (enroll.empty()) throw DataError("BuildTrials: empty enrollment manifest");
  if (test.empty()) throw DataError("BuildTrials: empty test manifest");

  std::set<std::string> enroll_ids;
  for (const auto &e : enroll) {
    if (e.utterance_id.empty() || e.speaker_id.empty() || e.phrase_id.empty())
      throw DataError("BuildTrials: empty id field in enrollment manifest");
    enroll_ids.insert(e.utterance_id);
  }
  for (const auto &t : test) {
    if (t.utterance_id.empty() || t.speaker_id.empty() || t.phrase_id.empty())
      throw DataError("BuildTrials: empty id field in test manifest");
    if (enroll_ids.count(t.utterance_id))
      throw DataError("BuildTrials: test utterance " + t.utterance_id +
                      " also present in enrollment");
  }

  // One model per (speaker, phrase) pair, in sorted order so the trial list
  // is reproducible regardless of manifest ordering.
  std::map<std::string, std::pair<std::string, std::string>> models;
  for (const auto &e : enroll)
    models.emplace(e.speaker_id + "-" + e.phrase_id,
                   std::make_pair(e.speaker_id, e.phrase_id));

  TrialSet set;
  set.trials.reserve(models.size() * test.size());
  for (const auto &[model_id, sp] : models) {
    for (const auto &t : test) {
      Trial trial;
      trial.model_id = model_id;
      trial.model_speaker = sp.first;
      trial.model_phrase = sp.second;
      trial.test_utt_id = t.utterance_id;
      trial.test_path = t.path;
      bool same_speaker = (t.speaker_id == sp.first);
      bool same_phrase = (t.phrase_id == sp.second);
      trial.type = same_speaker
                       ? (same_phrase ? TrialType::kGenuine
                                      : TrialType::kTargetWrong)
                       : (same_phrase ? TrialType::kImposterCorrect
                                      : TrialType::kImposterWrong);
      set.trials.push_back(std::move(trial));
    }
  }
  return set;
}

void WriteTrials(const std::string &path, const TrialSet &set) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  for (const auto &t : set.trials) {
    os << t.model_id << ' ' << t.model_phrase << ' ' << t.test_path << ' '
       << TrialTypeName(t.type) << '\n';
  }
  if (!os) throw DataError("failed writing trial list: " + path);
}

TrialSet ReadTrials(const std::string &path,
                    const std::vector<ManifestEntry> &test_manifest) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open trial list: " + path);
  std::filesystem::path base = std::filesystem::path(path).parent_path();

  // Trial rows reference tests by path; recover the utterance ids through
  // the manifest.  Paths on both sides are resolved before comparison.
  std::map<std::string, const ManifestEntry *> by_path;
  for (const auto &e : test_manifest) {
    by_path[std::filesystem::weakly_canonical(e.path).string()] = &e;
  }

  TrialSet set;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string model_id, phrase_id, test_path, type_name, extra;
    if (!(ls >> model_id >> phrase_id >> test_path >> type_name) ||
        (ls >> extra)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": trial rows need exactly 4 fields");
    }
    std::filesystem::path p(test_path);
    if (p.is_relative()) p = base / p;
    auto it = by_path.find(std::filesystem::weakly_canonical(p).string());
    if (it == by_path.end())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": test path not present in test manifest: " +
                      test_path);

    Trial t;
    t.model_id = model_id;
    t.model_phrase = phrase_id;
    if (model_id.size() < phrase_id.size() + 2 ||
        model_id.substr(model_id.size() - phrase_id.size() - 1) !=
            "-" + phrase_id) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": model id does not end in -" + phrase_id);
    }
    t.model_speaker =
        model_id.substr(0, model_id.size() - phrase_id.size() - 1);
    t.test_utt_id = it->second->utterance_id;
    t.test_path = it->second->path;
    t.type = TrialTypeFromName(type_name);
    set.trials.push_back(std::move(t));
  }
  if (set.trials.empty()) throw DataError("empty trial list: " + path);
  return set;
}

}  // namespace corpus
}  // namespace vsv
