// vsv/cli/config.cpp

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

#include "vsv/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vsv/core/common.hpp"
#include "vsv/frontend/warp.hpp"

namespace vsv {
namespace cli {

namespace {

std::string Trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string Where(const std::string &name, int line) {
  return name + ":" + std::to_string(line) + ": ";
}

}  // namespace

ConfigFile ConfigFile::Parse(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open config file: " + path);
  std::ostringstream text;
  text << is.rdbuf();
  return ParseText(text.str(), path);
}

ConfigFile ConfigFile::ParseText(const std::string &text,
                                 const std::string &name) {
  ConfigFile file;
  file.name_ = name;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ConfigError(Where(name, line_no) + "malformed section header `" +
                          t + "`");
      section = Trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigError(Where(name, line_no) + "empty section name");
      file.sections_[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(Where(name, line_no) +
                        "expected `key = value` or `[section]`, got `" + t +
                        "`");
    if (section.empty())
      throw ConfigError(Where(name, line_no) +
                        "key before any [section] header");
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(Where(name, line_no) + "empty key");
    if (value.empty())
      throw ConfigError(Where(name, line_no) + "empty value for key `" + key +
                        "`");
    if (!file.sections_[section].emplace(key, value).second)
      throw ConfigError(Where(name, line_no) + "duplicate key `" + key +
                        "` in section [" + section + "]");
  }
  return file;
}

bool ConfigFile::Has(const std::string &section,
                     const std::string &key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::GetString(const std::string &section,
                                  const std::string &key,
                                  const std::string &fallback) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::int64_t ConfigFile::GetInt(const std::string &section,
                                const std::string &key,
                                std::int64_t fallback) const {
  if (!Has(section, key)) return fallback;
  const std::string value = GetString(section, key, "");
  std::size_t consumed = 0;
  std::int64_t parsed = 0;
  try {
    parsed = std::stoll(value, &consumed);
  } catch (const std::exception &) {
    consumed = 0;
  }
  if (consumed != value.size())
    throw ConfigError(name_ + ": [" + section + "] " + key +
                      ": expected an integer, got `" + value + "`");
  return parsed;
}

double ConfigFile::GetDouble(const std::string &section,
                             const std::string &key, double fallback) const {
  if (!Has(section, key)) return fallback;
  const std::string value = GetString(section, key, "");
  std::size_t consumed = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &consumed);
  } catch (const std::exception &) {
    consumed = 0;
  }
  if (consumed != value.size() || !std::isfinite(parsed))
    throw ConfigError(name_ + ": [" + section + "] " + key +
                      ": expected a number, got `" + value + "`");
  return parsed;
}

bool ConfigFile::GetBool(const std::string &section, const std::string &key,
                         bool fallback) const {
  if (!Has(section, key)) return fallback;
  const std::string value = GetString(section, key, "");
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError(name_ + ": [" + section + "] " + key +
                    ": expected true or false, got `" + value + "`");
}

std::vector<std::string> ConfigFile::GetTokens(const std::string &section,
                                               const std::string &key) const {
  std::vector<std::string> tokens;
  std::istringstream is(GetString(section, key, ""));
  std::string token;
  while (is >> token) tokens.push_back(token);
  return tokens;
}

void ConfigFile::CheckKeys(const std::string &section,
                           const std::set<std::string> &allowed) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return;
  for (const auto &[key, value] : s->second)
    if (!allowed.count(key))
      throw ConfigError(name_ + ": unknown key `" + key + "` in section [" +
                        section + "]");
}

void ConfigFile::CheckSections(const std::set<std::string> &allowed) const {
  for (const auto &[section, keys] : sections_)
    if (!allowed.count(section))
      throw ConfigError(name_ + ": unknown section [" + section + "]");
}

std::vector<int> ParseAlphaGrid(const std::string &value) {
  if (Trim(value) == "all") return frontend::WarpGrid();
  std::vector<int> grid;
  std::istringstream is(value);
  std::string token;
  while (is >> token) grid.push_back(ParseAlpha(token));
  if (grid.empty()) throw ConfigError("empty warp factor list");
  std::sort(grid.begin(), grid.end());
  if (std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw ConfigError("duplicate warp factor in grid");
  return grid;
}

int ParseAlpha(const std::string &value) {
  std::size_t consumed = 0;
  double alpha = 0.0;
  try {
    alpha = std::stod(value, &consumed);
  } catch (const std::exception &) {
    consumed = 0;
  }
  if (consumed != value.size())
    throw ConfigError("bad warp factor `" + value + "`");
  const int h = static_cast<int>(std::llround(alpha * 100.0));
  const bool on_grid = h >= frontend::kWarpGridLow &&
                       h <= frontend::kWarpGridHigh &&
                       (h - frontend::kWarpGridLow) % frontend::kWarpGridStep ==
                           0 &&
                       std::abs(alpha * 100.0 - h) < 1e-6;
  if (!on_grid)
    throw ConfigError("warp factor " + value +
                      " is outside the supported grid 0.80..1.20 step 0.02");
  return h;
}

void ExperimentConfig::Validate() const {
  corpus.Validate();
  frontend.Validate();
  if (out_dir.empty()) throw ConfigError("experiment: empty output directory");
  if (features.empty())
    throw ConfigError("experiment: no features selected");
  for (const auto &f : features)
    if (f != "mfcc" && f != "spk-bn" && f != "apc-bn")
      throw ConfigError("experiment: unknown feature `" + f +
                        "` (expected mfcc, spk-bn or apc-bn)");
  if (std::set<std::string>(features.begin(), features.end()).size() !=
      features.size())
    throw ConfigError("experiment: duplicate feature selection");
  if (backend != "gmm-ubm" && backend != "ivector")
    throw ConfigError("experiment: unknown backend `" + backend +
                      "` (expected gmm-ubm or ivector)");
  if (grid.empty()) throw ConfigError("experiment: empty warp grid");
  if (workers < 1) throw ConfigError("experiment: workers must be positive");
  spkbn.Validate();
  apc.Validate();
  dcf.Validate();
  if (pca_dim < 1) throw ConfigError("pca: dim must be positive");
  // The bottleneck projection cannot widen the tapped layer.
  for (const auto &f : features) {
    if (f == "spk-bn" && (spkbn_tap < 1 || spkbn_tap > spkbn.hidden_layers))
      throw ConfigError("spk-bn: tap " + std::to_string(spkbn_tap) +
                        " outside 1.." + std::to_string(spkbn.hidden_layers));
    if (f == "spk-bn" && pca_dim > spkbn.hidden_width)
      throw ConfigError("pca: dim " + std::to_string(pca_dim) +
                        " exceeds the spk-bn hidden width " +
                        std::to_string(spkbn.hidden_width));
    if (f == "apc-bn" && pca_dim > apc.hidden)
      throw ConfigError("pca: dim " + std::to_string(pca_dim) +
                        " exceeds the apc-bn hidden size " +
                        std::to_string(apc.hidden));
  }
}

ExperimentConfig LoadExperimentConfig(const std::string &path) {
  const ConfigFile file = ConfigFile::Parse(path);
  file.CheckSections({"corpus", "frontend", "experiment", "gmm", "ivector",
                      "spk-bn", "apc-bn", "pca", "dcf"});
  const std::filesystem::path base =
      std::filesystem::absolute(path).parent_path();
  auto resolve = [&](const std::string &p) {
    return std::filesystem::path(p).is_absolute()
               ? p
               : (base / p).lexically_normal().string();
  };

  ExperimentConfig cfg;

  file.CheckKeys(
      "corpus",
      {"dir", "speakers", "background-speakers", "phrases", "enroll-sessions",
       "test-sessions", "background-sessions", "sample-rate", "vtl-low",
       "vtl-high", "f0-low", "f0-high", "noise-floor-db", "seed"});
  cfg.corpus_dir = resolve(file.GetString("corpus", "dir", "corpus"));
  auto &c = cfg.corpus;
  c.num_speakers = static_cast<int>(file.GetInt("corpus", "speakers", 20));
  c.num_background_speakers =
      static_cast<int>(file.GetInt("corpus", "background-speakers", 20));
  c.num_phrases = static_cast<int>(file.GetInt("corpus", "phrases", 5));
  c.enroll_sessions =
      static_cast<int>(file.GetInt("corpus", "enroll-sessions", 3));
  c.test_sessions = static_cast<int>(file.GetInt("corpus", "test-sessions", 2));
  c.background_sessions =
      static_cast<int>(file.GetInt("corpus", "background-sessions", 3));
  c.sample_rate = static_cast<int>(file.GetInt("corpus", "sample-rate", 16000));
  c.vtl_low = file.GetDouble("corpus", "vtl-low", c.vtl_low);
  c.vtl_high = file.GetDouble("corpus", "vtl-high", c.vtl_high);
  c.f0_low = file.GetDouble("corpus", "f0-low", c.f0_low);
  c.f0_high = file.GetDouble("corpus", "f0-high", c.f0_high);
  c.noise_floor_db =
      file.GetDouble("corpus", "noise-floor-db", c.noise_floor_db);
  c.seed = static_cast<std::uint64_t>(file.GetInt("corpus", "seed", 1));

  file.CheckKeys("frontend",
                 {"frame-length-ms", "frame-shift-ms", "mel-filters",
                  "cepstra", "pre-emphasis", "rasta", "delta-window",
                  "vad-margin-db", "vad-percentile"});
  auto &fe = cfg.frontend;
  fe.frame_length_ms =
      file.GetDouble("frontend", "frame-length-ms", fe.frame_length_ms);
  fe.frame_shift_ms =
      file.GetDouble("frontend", "frame-shift-ms", fe.frame_shift_ms);
  fe.num_mel_filters =
      static_cast<int>(file.GetInt("frontend", "mel-filters", 26));
  fe.num_cepstra = static_cast<int>(file.GetInt("frontend", "cepstra", 19));
  fe.pre_emphasis =
      file.GetDouble("frontend", "pre-emphasis", fe.pre_emphasis);
  fe.apply_rasta = file.GetBool("frontend", "rasta", fe.apply_rasta);
  fe.delta_window =
      static_cast<int>(file.GetInt("frontend", "delta-window", 2));
  fe.vad_margin_db =
      file.GetDouble("frontend", "vad-margin-db", fe.vad_margin_db);
  fe.vad_percentile =
      file.GetDouble("frontend", "vad-percentile", fe.vad_percentile);

  file.CheckKeys("experiment", {"out-dir", "features", "backend", "alphas",
                                "workers", "seed"});
  cfg.out_dir = resolve(file.GetString("experiment", "out-dir", "out"));
  cfg.features = file.GetTokens("experiment", "features");
  if (cfg.features.empty()) cfg.features = {"mfcc"};
  cfg.backend = file.GetString("experiment", "backend", "gmm-ubm");
  cfg.grid = ParseAlphaGrid(file.GetString("experiment", "alphas", "all"));
  cfg.workers = static_cast<int>(file.GetInt("experiment", "workers", 1));
  cfg.seed = static_cast<std::uint64_t>(file.GetInt("experiment", "seed", 0));

  file.CheckKeys("gmm", {"components", "em-iterations", "kmeans-iterations",
                         "relevance", "map-iterations"});
  cfg.ubm.num_components =
      static_cast<int>(file.GetInt("gmm", "components", 64));
  cfg.ubm.em_iterations =
      static_cast<int>(file.GetInt("gmm", "em-iterations", 10));
  cfg.ubm.kmeans_iterations =
      static_cast<int>(file.GetInt("gmm", "kmeans-iterations", 5));
  cfg.map.relevance = file.GetDouble("gmm", "relevance", cfg.map.relevance);
  cfg.map.iterations =
      static_cast<int>(file.GetInt("gmm", "map-iterations", 3));

  file.CheckKeys("ivector", {"rank", "em-iterations", "snorm-iterations",
                             "plda-iterations"});
  cfg.tv.rank = static_cast<int>(file.GetInt("ivector", "rank", 100));
  cfg.tv.iterations =
      static_cast<int>(file.GetInt("ivector", "em-iterations", 10));
  cfg.snorm_iterations =
      static_cast<int>(file.GetInt("ivector", "snorm-iterations", 2));
  cfg.plda.iterations =
      static_cast<int>(file.GetInt("ivector", "plda-iterations", 10));

  file.CheckKeys("spk-bn",
                 {"hidden-layers", "hidden-width", "context", "epochs",
                  "batch", "batch-double-epochs", "lr-start", "lr-end",
                  "tap"});
  auto &sb = cfg.spkbn;
  sb.hidden_layers =
      static_cast<int>(file.GetInt("spk-bn", "hidden-layers", 7));
  // Desk-scale default width; the paper-scale 1024 is a config value away.
  sb.hidden_width =
      static_cast<int>(file.GetInt("spk-bn", "hidden-width", 64));
  sb.context = static_cast<int>(file.GetInt("spk-bn", "context", 11));
  sb.epochs = static_cast<int>(file.GetInt("spk-bn", "epochs", 30));
  sb.batch_size = static_cast<int>(file.GetInt("spk-bn", "batch", 256));
  if (file.Has("spk-bn", "batch-double-epochs")) {
    sb.batch_double_epochs.clear();
    for (const auto &token : file.GetTokens("spk-bn", "batch-double-epochs")) {
      std::size_t consumed = 0;
      int epoch = 0;
      try {
        epoch = std::stoi(token, &consumed);
      } catch (const std::exception &) {
        consumed = 0;
      }
      if (consumed != token.size())
        throw ConfigError("spk-bn: batch-double-epochs: expected integers, "
                          "got `" + token + "`");
      sb.batch_double_epochs.push_back(epoch);
    }
  }
  sb.lr_start = file.GetDouble("spk-bn", "lr-start", sb.lr_start);
  sb.lr_end = file.GetDouble("spk-bn", "lr-end", sb.lr_end);
  cfg.spkbn_tap = static_cast<int>(file.GetInt("spk-bn", "tap", 4));

  file.CheckKeys("apc-bn", {"layers", "hidden", "shift", "epochs", "batch",
                            "crop", "lr"});
  auto &ap = cfg.apc;
  ap.layers = static_cast<int>(file.GetInt("apc-bn", "layers", 3));
  // Desk-scale default; the paper-scale 512 is a config value away.
  ap.hidden = static_cast<int>(file.GetInt("apc-bn", "hidden", 32));
  ap.shift = static_cast<int>(file.GetInt("apc-bn", "shift", 5));
  ap.epochs = static_cast<int>(file.GetInt("apc-bn", "epochs", 20));
  ap.batch_size = static_cast<int>(file.GetInt("apc-bn", "batch", 32));
  ap.crop_length = static_cast<int>(file.GetInt("apc-bn", "crop", 64));
  ap.learning_rate = file.GetDouble("apc-bn", "lr", ap.learning_rate);

  file.CheckKeys("pca", {"dim"});
  cfg.pca_dim = static_cast<int>(file.GetInt("pca", "dim", 57));

  file.CheckKeys("dcf", {"c-miss", "c-fa", "p-target"});
  cfg.dcf.c_miss = file.GetDouble("dcf", "c-miss", cfg.dcf.c_miss);
  cfg.dcf.c_fa = file.GetDouble("dcf", "c-fa", cfg.dcf.c_fa);
  cfg.dcf.p_target = file.GetDouble("dcf", "p-target", cfg.dcf.p_target);

  cfg.Validate();
  return cfg;
}

}  // namespace cli
}  // namespace vsv
