// vsv/cli/config.hpp

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

#ifndef VSV_CLI_CONFIG_HPP_
#define VSV_CLI_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vsv/corpus/generate.hpp"
#include "vsv/eval/metrics.hpp"
#include "vsv/frontend/frontend.hpp"
#include "vsv/gmm/train.hpp"
#include "vsv/ivector/plda.hpp"
#include "vsv/ivector/tmatrix.hpp"
#include "vsv/nn/gru.hpp"
#include "vsv/nn/mlp.hpp"

namespace vsv {
namespace cli {

// Line-oriented `key = value` settings grouped into `[section]` blocks.
// Full-line comments start with `#`; duplicate keys within a section are
// configuration errors so typos cannot silently shadow each other.
class ConfigFile {
 public:
  static ConfigFile Parse(const std::string &path);
  static ConfigFile ParseText(const std::string &text, const std::string &name);

  bool Has(const std::string &section, const std::string &key) const;

  std::string GetString(const std::string &section, const std::string &key,
                        const std::string &fallback) const;
  std::int64_t GetInt(const std::string &section, const std::string &key,
                      std::int64_t fallback) const;
  double GetDouble(const std::string &section, const std::string &key,
                   double fallback) const;
  bool GetBool(const std::string &section, const std::string &key,
               bool fallback) const;
  // Whitespace-split value.
  std::vector<std::string> GetTokens(const std::string &section,
                                     const std::string &key) const;

  // Rejects keys outside `allowed` within `section`; a section absent from
  // the file passes trivially.
  void CheckKeys(const std::string &section,
                 const std::set<std::string> &allowed) const;
  // Rejects sections outside `allowed`.
  void CheckSections(const std::set<std::string> &allowed) const;

 private:
  std::string name_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Everything one experiment needs, resolved against module defaults.  The
// networks default to desk-scale widths; paper-scale shapes are plain
// config values away.
struct ExperimentConfig {
  corpus::CorpusConfig corpus;
  std::string corpus_dir;  // resolved against the config file's directory

  frontend::FrontendConfig frontend;

  std::string out_dir;
  std::vector<std::string> features;  // subset of mfcc, spk-bn, apc-bn
  std::string backend;                // gmm-ubm or ivector
  std::vector<int> grid;              // warp factors in hundredths
  int workers = 1;
  std::uint64_t seed = 0;

  gmm::UbmTrainConfig ubm;
  gmm::MapConfig map;

  ivector::TvTrainConfig tv;
  ivector::PldaTrainConfig plda;
  int snorm_iterations = 2;

  nn::SpkBnTrainConfig spkbn;
  int spkbn_tap = 4;
  nn::ApcTrainConfig apc;
  int pca_dim = 57;

  eval::DcfConfig dcf;

  void Validate() const;
};

// Warp factors from a config value: "all" expands to the full supported
// grid, otherwise whitespace-separated decimals (e.g. "0.90 1.00 1.10").
// Every factor must lie on the supported grid.
std::vector<int> ParseAlphaGrid(const std::string &value);

// One decimal warp factor to hundredths, validated against the grid.
int ParseAlpha(const std::string &value);

// Parses the file and applies every [section] with unknown-key checking.
// Relative corpus and output directories resolve against the config file's
// parent directory, so a config tree is relocatable.
ExperimentConfig LoadExperimentConfig(const std::string &path);

}  // namespace cli
}  // namespace vsv

#endif  // VSV_CLI_CONFIG_HPP_
