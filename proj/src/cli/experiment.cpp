// vsv/cli/experiment.cpp

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

#include "vsv/cli/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include "vsv/core/binary_io.hpp"
#include "vsv/core/common.hpp"
#include "vsv/core/parallel.hpp"
#include "vsv/core/rng.hpp"
#include "vsv/corpus/wav.hpp"
#include "vsv/eval/report.hpp"
#include "vsv/eval/scores.hpp"
#include "vsv/frontend/feature_io.hpp"
#include "vsv/gmm/diag_gmm.hpp"
#include "vsv/ivector/spherical.hpp"
#include "vsv/ivector/stats.hpp"

namespace vsv {
namespace cli {

namespace fs = std::filesystem;

namespace {

constexpr const char *kPartitions[] = {"background", "enroll", "test"};

void EnsureDir(const std::string &path) { fs::create_directories(path); }

std::string Join(const std::string &a, const std::string &b) {
  return a + "/" + b;
}

// Runs items on `workers` threads (inline when workers <= 1).  The first
// failure stops the queue and is rethrown after every thread joins.
void RunQueue(int workers, const std::vector<std::function<void()>> &items) {
  if (workers <= 1 || items.size() <= 1) {
    for (const auto &item : items) item();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::exception_ptr first_error;
  auto body = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      try {
        items[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t n =
      std::min<std::size_t>(static_cast<std::size_t>(workers), items.size());
  threads.reserve(n);
  for (std::size_t i = 0; i < n; ++i) threads.emplace_back(body);
  for (auto &t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Caps OpenMP parallelism while alive; queue workers supply the concurrency
// instead, so kernels must not oversubscribe the machine.
class OmpScope {
 public:
  explicit OmpScope(bool limit) : old_(par::MaxThreads()), limited_(limit) {
    if (limited_) par::SetThreads(1);
  }
  ~OmpScope() {
    if (limited_) par::SetThreads(old_);
  }
  OmpScope(const OmpScope &) = delete;
  OmpScope &operator=(const OmpScope &) = delete;

 private:
  int old_;
  bool limited_;
};

std::uint64_t StageSeed(const ExperimentConfig &cfg, const std::string &stage,
                        const std::string &feature, int h) {
  return Rng::Mix(cfg.seed, Rng::HashBytes(stage + ":" + feature + ":" +
                                           Layout::AlphaName(h)));
}

const std::vector<corpus::ManifestEntry> &Partition(const CorpusData &data,
                                                    const std::string &name) {
  if (name == "background") return data.background;
  if (name == "enroll") return data.enroll;
  return data.test;
}

std::string PartitionManifest(const CorpusData &data,
                              const std::string &name) {
  if (name == "background") return data.layout.BackgroundManifest();
  if (name == "enroll") return data.layout.EnrollManifest();
  return data.layout.TestManifest();
}

std::vector<std::string> PartitionFeaturePaths(
    const Layout &layout, const std::string &feature, int h,
    const std::string &partition, const CorpusData &data) {
  std::vector<std::string> paths;
  const auto &entries = Partition(data, partition);
  paths.reserve(entries.size());
  for (const auto &e : entries)
    paths.push_back(frontend::FeaturePath(
        layout.FeatureDir(feature, h, partition), e.utterance_id));
  return paths;
}

// Feature matrices of one partition, in manifest order.
std::vector<Eigen::MatrixXd> LoadPartitionValues(
    const Layout &layout, const std::string &feature, int h,
    const std::string &partition, const CorpusData &data) {
  std::vector<Eigen::MatrixXd> values;
  const auto &entries = Partition(data, partition);
  values.reserve(entries.size());
  for (const auto &e : entries)
    values.push_back(frontend::ReadFeature(frontend::FeaturePath(
                                               layout.FeatureDir(feature, h,
                                                                 partition),
                                               e.utterance_id))
                         .values);
  return values;
}

Eigen::MatrixXd PoolColumns(const std::vector<Eigen::MatrixXd> &blocks) {
  if (blocks.empty()) throw DataError("no feature matrices to pool");
  Eigen::Index cols = 0;
  for (const auto &b : blocks) cols += b.cols();
  Eigen::MatrixXd pooled(blocks.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto &b : blocks) {
    pooled.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return pooled;
}

// Enrollment sessions grouped into models, keyed "<speaker>-<phrase>"; the
// same key construction the trial builder uses.
std::map<std::string, std::vector<const corpus::ManifestEntry *>>
GroupEnrollModels(const CorpusData &data) {
  std::map<std::string, std::vector<const corpus::ManifestEntry *>> models;
  for (const auto &e : data.enroll)
    models[e.speaker_id + "-" + e.phrase_id].push_back(&e);
  return models;
}

// Enrolled vector store, magic "VSVI": u32 count, then per model a
// length-prefixed id and the vector.
void WriteEnrollVectors(const std::string &path,
                        const std::map<std::string, Eigen::VectorXd> &vecs) {
  auto os = io::OpenOut(path);
  io::WriteMagic(os, "VSVI", 1);
  io::WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(vecs.size()));
  for (const auto &[id, v] : vecs) {
    io::WriteString(os, id);
    io::WriteVector(os, v);
  }
  if (!os) throw DataError("failed writing enrolled vectors: " + path);
}

std::map<std::string, Eigen::VectorXd> ReadEnrollVectors(
    const std::string &path) {
  auto is = io::OpenIn(path);
  if (io::ExpectMagic(is, "VSVI", path) != 1)
    throw DataError("unsupported enrolled vector version: " + path);
  const auto count = io::ReadScalar<std::uint32_t>(is, "model count");
  std::map<std::string, Eigen::VectorXd> vecs;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = io::ReadString(is, "model id");
    Eigen::VectorXd v = io::ReadVector(is, "enrolled vector " + id);
    if (!vecs.emplace(std::move(id), std::move(v)).second)
      throw DataError("duplicate model id in " + path);
  }
  return vecs;
}

}  // namespace

std::string Layout::AlphaName(int hundredths) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "a%03d", hundredths);
  return buf;
}

std::string Layout::AlphaRoot(const std::string &feature, int h) const {
  return out_dir + "/" + feature + "/" + AlphaName(h);
}
std::string Layout::FeatureDir(const std::string &feature, int h,
                               const std::string &partition) const {
  return Join(Join(AlphaRoot(feature, h), "features"), partition);
}
std::string Layout::ModelsDir(const std::string &feature, int h) const {
  return Join(AlphaRoot(feature, h), "models");
}
std::string Layout::ScoresDir(const std::string &feature, int h) const {
  return Join(AlphaRoot(feature, h), "scores");
}
std::string Layout::NetFile(const std::string &feature, int h) const {
  return Join(ModelsDir(feature, h), "net.vsvn");
}
std::string Layout::PcaFile(const std::string &feature, int h) const {
  return Join(ModelsDir(feature, h), "pca.vsvn");
}
std::string Layout::UbmFile(const std::string &feature, int h) const {
  return Join(ModelsDir(feature, h), "ubm.vsvg");
}
std::string Layout::TvFile(const std::string &feature, int h) const {
  return Join(ModelsDir(feature, h), "tv.vsvt");
}
std::string Layout::SnormFile(const std::string &feature, int h) const {
  return Join(ModelsDir(feature, h), "snorm.vsvs");
}
std::string Layout::PldaFile(const std::string &feature, int h) const {
  return Join(ModelsDir(feature, h), "plda.vsvp");
}
std::string Layout::EnrollVecFile(const std::string &feature, int h) const {
  return Join(ModelsDir(feature, h), "enroll.vsvi");
}
std::string Layout::SpeakerModelFile(const std::string &feature, int h,
                                     const std::string &model_id) const {
  return Join(Join(ModelsDir(feature, h), "speakers"), model_id + ".vsvg");
}
std::string Layout::ScoreFile(const std::string &feature, int h) const {
  return Join(ScoresDir(feature, h), "scores.txt");
}
std::string Layout::ReportFile(const std::string &feature, int h) const {
  return Join(ScoresDir(feature, h), "report.txt");
}
std::string Layout::DetFile(const std::string &feature, int h) const {
  return Join(ScoresDir(feature, h), "det.csv");
}
std::string Layout::FusedDir(const std::string &feature) const {
  return out_dir + "/" + feature + "/fused";
}
std::string Layout::FusedScoreFile(const std::string &feature) const {
  return Join(FusedDir(feature), "scores.txt");
}
std::string Layout::FusedReportFile(const std::string &feature) const {
  return Join(FusedDir(feature), "report.txt");
}
std::string Layout::FusedDetFile(const std::string &feature) const {
  return Join(FusedDir(feature), "det.csv");
}
std::string Layout::CrossDir() const { return out_dir + "/fused"; }
std::string Layout::CrossScoreFile() const {
  return Join(CrossDir(), "scores.txt");
}
std::string Layout::CrossReportFile() const {
  return Join(CrossDir(), "report.txt");
}
std::string Layout::CrossDetFile() const { return Join(CrossDir(), "det.csv"); }

bool NeedsRebuild(const std::vector<std::string> &outputs,
                  const std::vector<std::string> &inputs) {
  fs::file_time_type newest_in = fs::file_time_type::min();
  for (const auto &in : inputs) {
    std::error_code ec;
    const auto t = fs::last_write_time(in, ec);
    if (ec) throw DataError("missing stage input: " + in);
    newest_in = std::max(newest_in, t);
  }
  fs::file_time_type oldest_out = fs::file_time_type::max();
  for (const auto &out : outputs) {
    std::error_code ec;
    const auto t = fs::last_write_time(out, ec);
    if (ec) return true;
    oldest_out = std::min(oldest_out, t);
  }
  return oldest_out < newest_in;
}

CorpusData LoadCorpusData(const std::string &corpus_dir) {
  corpus::CorpusLayout layout(corpus_dir);
  if (!fs::exists(layout.TrialList()))
    throw DataError("no corpus at " + corpus_dir +
                    " (missing trial list; run synth-corpus first)");
  CorpusData data{layout,
                  corpus::ReadManifest(layout.BackgroundManifest()),
                  corpus::ReadManifest(layout.EnrollManifest()),
                  corpus::ReadManifest(layout.TestManifest()),
                  {}};
  data.trials = corpus::ReadTrials(layout.TrialList(), data.test);
  return data;
}

bool StageExtractMfcc(const ExperimentConfig &cfg, const Layout &layout,
                      const CorpusData &data, const std::vector<int> &grid,
                      bool force, int workers) {
  for (const char *partition : kPartitions)
    for (int h : grid) EnsureDir(layout.FeatureDir("mfcc", h, partition));

  std::atomic<int> extracted{0};
  std::vector<std::function<void()>> items;
  for (const char *partition : kPartitions) {
    const std::string manifest = PartitionManifest(data, partition);
    for (const auto &entry : Partition(data, partition)) {
      const corpus::ManifestEntry *e = &entry;
      const std::string part = partition;
      items.push_back([&, e, part, manifest] {
        const std::vector<std::string> inputs = {e->path, manifest};
        std::vector<int> stale;
        for (int h : grid) {
          const std::string out = frontend::FeaturePath(
              layout.FeatureDir("mfcc", h, part), e->utterance_id);
          if (force || NeedsRebuild({out}, inputs)) stale.push_back(h);
        }
        if (stale.empty()) return;
        const Utterance utt = corpus::ReadWav(e->path);
        auto grid_features = frontend::ExtractWarpGrid(utt, cfg.frontend,
                                                       stale);
        for (auto &[h, feature] : grid_features) {
          feature.utterance_id = e->utterance_id;
          feature.alpha_hundredths = h;
          frontend::WriteFeature(
              frontend::FeaturePath(layout.FeatureDir("mfcc", h, part),
                                    e->utterance_id),
              feature);
        }
        extracted.fetch_add(1);
      });
    }
  }
  RunQueue(workers, items);
  return extracted.load() > 0;
}

bool StageTrainSpkBn(const ExperimentConfig &cfg, const Layout &layout,
                     const CorpusData &data, int h, bool force) {
  std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, "mfcc", h, "background", data);
  inputs.push_back(data.layout.BackgroundManifest());
  const std::string out = layout.NetFile("spk-bn", h);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  std::vector<Eigen::MatrixXd> features =
      LoadPartitionValues(layout, "mfcc", h, "background", data);
  std::vector<std::string> speakers;
  speakers.reserve(data.background.size());
  for (const auto &e : data.background) speakers.push_back(e.speaker_id);

  nn::SpkBnTrainConfig train = cfg.spkbn;
  train.seed = StageSeed(cfg, "train-spkbn", "spk-bn", h);
  const nn::SpkBnModel model = nn::TrainSpkBn(features, speakers, train);
  EnsureDir(layout.ModelsDir("spk-bn", h));
  model.WriteFile(out);
  return true;
}

bool StageTrainApc(const ExperimentConfig &cfg, const Layout &layout,
                   const CorpusData &data, int h, bool force) {
  std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, "mfcc", h, "background", data);
  inputs.push_back(data.layout.BackgroundManifest());
  const std::string out = layout.NetFile("apc-bn", h);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  std::vector<Eigen::MatrixXd> features =
      LoadPartitionValues(layout, "mfcc", h, "background", data);
  nn::ApcTrainConfig train = cfg.apc;
  train.seed = StageSeed(cfg, "train-apc", "apc-bn", h);
  const nn::ApcModel model = nn::TrainApc(features, train);
  EnsureDir(layout.ModelsDir("apc-bn", h));
  model.params.WriteFile(out);
  return true;
}

bool StageFitPca(const ExperimentConfig &cfg, const Layout &layout,
                 const CorpusData &data, const std::string &feature, int h,
                 bool force) {
  if (feature != "spk-bn" && feature != "apc-bn")
    throw ConfigError("fit-pca: feature must be spk-bn or apc-bn, got " +
                      feature);
  std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, "mfcc", h, "background", data);
  inputs.push_back(layout.NetFile(feature, h));
  const std::string out = layout.PcaFile(feature, h);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  std::vector<Eigen::MatrixXd> features =
      LoadPartitionValues(layout, "mfcc", h, "background", data);
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(features.size());
  if (feature == "spk-bn") {
    const nn::SpkBnModel model =
        nn::SpkBnModel::ReadFile(layout.NetFile(feature, h));
    for (const auto &f : features)
      activations.push_back(nn::MlpTapActivations(model, f, cfg.spkbn_tap));
  } else {
    const nn::GruParams params =
        nn::GruParams::ReadFile(layout.NetFile(feature, h));
    for (const auto &f : features)
      activations.push_back(nn::GruTapActivations(params, f));
  }
  const nn::PcaProjection pca =
      nn::FitPca(PoolColumns(activations), cfg.pca_dim);
  pca.WriteFile(out);
  return true;
}

bool StageExtractBn(const ExperimentConfig &cfg, const Layout &layout,
                    const CorpusData &data, const std::string &feature, int h,
                    bool force) {
  if (feature != "spk-bn" && feature != "apc-bn")
    throw ConfigError("extract: feature must be spk-bn or apc-bn, got " +
                      feature);
  const std::string net = layout.NetFile(feature, h);
  const std::string pca_path = layout.PcaFile(feature, h);

  struct Job {
    std::string in, out;
  };
  std::vector<Job> stale;
  for (const char *partition : kPartitions) {
    EnsureDir(layout.FeatureDir(feature, h, partition));
    for (const auto &e : Partition(data, partition)) {
      Job job{frontend::FeaturePath(layout.FeatureDir("mfcc", h, partition),
                                    e.utterance_id),
              frontend::FeaturePath(layout.FeatureDir(feature, h, partition),
                                    e.utterance_id)};
      if (force || NeedsRebuild({job.out}, {job.in, net, pca_path}))
        stale.push_back(std::move(job));
    }
  }
  if (stale.empty()) return false;

  const nn::PcaProjection pca = nn::PcaProjection::ReadFile(pca_path);
  if (feature == "spk-bn") {
    const nn::SpkBnModel model = nn::SpkBnModel::ReadFile(net);
    for (const auto &job : stale)
      frontend::WriteFeature(job.out,
                             nn::ExtractMlpBn(frontend::ReadFeature(job.in),
                                              model, cfg.spkbn_tap, pca));
  } else {
    const nn::GruParams params = nn::GruParams::ReadFile(net);
    for (const auto &job : stale)
      frontend::WriteFeature(
          job.out, nn::ExtractApcBn(frontend::ReadFeature(job.in), params,
                                    pca));
  }
  return true;
}

bool StageTrainUbm(const ExperimentConfig &cfg, const Layout &layout,
                   const CorpusData &data, const std::string &feature, int h,
                   bool force) {
  const std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, feature, h, "background", data);
  const std::string out = layout.UbmFile(feature, h);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  const Eigen::MatrixXd frames =
      PoolColumns(LoadPartitionValues(layout, feature, h, "background", data));
  gmm::UbmTrainConfig train = cfg.ubm;
  train.seed = StageSeed(cfg, "train-ubm", feature, h);
  const gmm::UbmTrainResult result = gmm::TrainUbm(frames, train);
  EnsureDir(layout.ModelsDir(feature, h));
  result.gmm.WriteFile(out);
  logging::Info("train-ubm " + feature + " " + Layout::AlphaName(h) +
                ": final avg loglik " +
                std::to_string(result.avg_loglik.back()));
  return true;
}

bool StageTrainTv(const ExperimentConfig &cfg, const Layout &layout,
                  const CorpusData &data, const std::string &feature, int h,
                  bool force) {
  std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, feature, h, "background", data);
  inputs.push_back(layout.UbmFile(feature, h));
  const std::string out = layout.TvFile(feature, h);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  const gmm::DiagonalGmm ubm =
      gmm::DiagonalGmm::ReadFile(layout.UbmFile(feature, h));
  std::vector<ivector::BaumWelchStats> stats;
  for (const auto &values :
       LoadPartitionValues(layout, feature, h, "background", data))
    stats.push_back(ivector::AccumulateBwStats(ubm, values));
  ivector::TvTrainConfig train = cfg.tv;
  train.seed = StageSeed(cfg, "train-tv", feature, h);
  const ivector::TvTrainResult result = ivector::TrainTv(stats, ubm, train);
  result.model.WriteFile(out);
  return true;
}

bool StageTrainPlda(const ExperimentConfig &cfg, const Layout &layout,
                    const CorpusData &data, const std::string &feature, int h,
                    bool force) {
  std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, feature, h, "background", data);
  inputs.push_back(layout.UbmFile(feature, h));
  inputs.push_back(layout.TvFile(feature, h));
  inputs.push_back(data.layout.BackgroundManifest());
  const std::string snorm_out = layout.SnormFile(feature, h);
  const std::string plda_out = layout.PldaFile(feature, h);
  if (!force && !NeedsRebuild({snorm_out, plda_out}, inputs)) return false;

  const gmm::DiagonalGmm ubm =
      gmm::DiagonalGmm::ReadFile(layout.UbmFile(feature, h));
  const ivector::TotalVariabilityModel tv =
      ivector::TotalVariabilityModel::ReadFile(layout.TvFile(feature, h));
  std::vector<ivector::BaumWelchStats> stats;
  for (const auto &values :
       LoadPartitionValues(layout, feature, h, "background", data))
    stats.push_back(ivector::AccumulateBwStats(ubm, values));
  const Eigen::MatrixXd ivecs = ivector::ExtractIvectors(stats, tv);

  const ivector::SphericalNorm snorm =
      ivector::FitSphericalNorm(ivecs, cfg.snorm_iterations);
  const Eigen::MatrixXd normed = snorm.ApplyAll(ivecs);

  // Class labels: background speaker ids in sorted order.
  std::map<std::string, int> speaker_index;
  for (const auto &e : data.background) speaker_index.emplace(e.speaker_id, 0);
  int next_index = 0;
  for (auto &[speaker, index] : speaker_index) index = next_index++;
  std::vector<int> labels;
  labels.reserve(data.background.size());
  for (const auto &e : data.background)
    labels.push_back(speaker_index.at(e.speaker_id));

  const ivector::PldaTrainResult result =
      ivector::TrainPlda(normed, labels, cfg.plda);
  snorm.WriteFile(snorm_out);
  result.model.WriteFile(plda_out);
  return true;
}

bool StageEnroll(const ExperimentConfig &cfg, const Layout &layout,
                 const CorpusData &data, const std::string &feature, int h,
                 bool force) {
  const auto models = GroupEnrollModels(data);
  std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, feature, h, "enroll", data);
  inputs.push_back(layout.UbmFile(feature, h));
  inputs.push_back(data.layout.EnrollManifest());

  auto feature_of = [&](const corpus::ManifestEntry *e) {
    return frontend::ReadFeature(
               frontend::FeaturePath(layout.FeatureDir(feature, h, "enroll"),
                                     e->utterance_id))
        .values;
  };

  if (cfg.backend == "gmm-ubm") {
    std::vector<std::string> outputs;
    outputs.reserve(models.size());
    for (const auto &[model_id, sessions] : models)
      outputs.push_back(layout.SpeakerModelFile(feature, h, model_id));
    if (!force && !NeedsRebuild(outputs, inputs)) return false;

    const gmm::DiagonalGmm ubm =
        gmm::DiagonalGmm::ReadFile(layout.UbmFile(feature, h));
    EnsureDir(Join(layout.ModelsDir(feature, h), "speakers"));
    for (const auto &[model_id, sessions] : models) {
      std::vector<Eigen::MatrixXd> blocks;
      blocks.reserve(sessions.size());
      for (const auto *e : sessions) blocks.push_back(feature_of(e));
      const gmm::DiagonalGmm model =
          gmm::MapAdaptMeans(ubm, PoolColumns(blocks), cfg.map);
      model.WriteFile(layout.SpeakerModelFile(feature, h, model_id));
    }
    return true;
  }

  // i-vector backend: one normalized average vector per model.
  inputs.push_back(layout.TvFile(feature, h));
  inputs.push_back(layout.SnormFile(feature, h));
  const std::string out = layout.EnrollVecFile(feature, h);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  const gmm::DiagonalGmm ubm =
      gmm::DiagonalGmm::ReadFile(layout.UbmFile(feature, h));
  const ivector::TotalVariabilityModel tv =
      ivector::TotalVariabilityModel::ReadFile(layout.TvFile(feature, h));
  const ivector::SphericalNorm snorm =
      ivector::SphericalNorm::ReadFile(layout.SnormFile(feature, h));
  std::map<std::string, Eigen::VectorXd> enrolled;
  for (const auto &[model_id, sessions] : models) {
    std::vector<Eigen::VectorXd> session_vecs;
    session_vecs.reserve(sessions.size());
    for (const auto *e : sessions)
      session_vecs.push_back(snorm.Apply(ivector::ExtractIvector(
          ivector::AccumulateBwStats(ubm, feature_of(e)), tv)));
    enrolled.emplace(model_id, ivector::EnrollAverage(session_vecs));
  }
  WriteEnrollVectors(out, enrolled);
  return true;
}

bool StageScore(const ExperimentConfig &cfg, const Layout &layout,
                const CorpusData &data, const std::string &feature, int h,
                bool force) {
  const auto models = GroupEnrollModels(data);
  std::vector<std::string> inputs =
      PartitionFeaturePaths(layout, feature, h, "test", data);
  inputs.push_back(layout.UbmFile(feature, h));
  inputs.push_back(data.layout.TrialList());
  if (cfg.backend == "gmm-ubm") {
    for (const auto &[model_id, sessions] : models)
      inputs.push_back(layout.SpeakerModelFile(feature, h, model_id));
  } else {
    inputs.push_back(layout.TvFile(feature, h));
    inputs.push_back(layout.SnormFile(feature, h));
    inputs.push_back(layout.PldaFile(feature, h));
    inputs.push_back(layout.EnrollVecFile(feature, h));
  }
  const std::string out = layout.ScoreFile(feature, h);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  auto test_feature = [&](const std::string &utt_id) {
    return frontend::ReadFeature(
               frontend::FeaturePath(layout.FeatureDir(feature, h, "test"),
                                     utt_id))
        .values;
  };

  eval::ScoreSet set;
  set.system_id = feature + "-" + Layout::AlphaName(h);
  set.entries.reserve(data.trials.trials.size());

  if (cfg.backend == "gmm-ubm") {
    const gmm::DiagonalGmm ubm =
        gmm::DiagonalGmm::ReadFile(layout.UbmFile(feature, h));
    const gmm::GmmLogDensity background(ubm);
    std::map<std::string, gmm::GmmLogDensity> model_density;
    for (const auto &[model_id, sessions] : models)
      model_density.emplace(model_id,
                            gmm::GmmLogDensity(gmm::DiagonalGmm::ReadFile(
                                layout.SpeakerModelFile(feature, h,
                                                        model_id))));
    // The background side of the ratio depends only on the utterance, so it
    // is computed once per test recording.
    std::map<std::string, std::pair<Eigen::MatrixXd, double>> cache;
    for (const auto &trial : data.trials.trials) {
      auto it = cache.find(trial.test_utt_id);
      if (it == cache.end()) {
        Eigen::MatrixXd frames = test_feature(trial.test_utt_id);
        const double bg = gmm::AverageLogLik(background, frames);
        it = cache.emplace(trial.test_utt_id,
                           std::make_pair(std::move(frames), bg))
                 .first;
      }
      const auto density = model_density.find(trial.model_id);
      if (density == model_density.end())
        throw DataError("score: no enrolled model " + trial.model_id);
      const double score =
          gmm::AverageLogLik(density->second, it->second.first) -
          it->second.second;
      set.entries.push_back(
          {trial.model_id, trial.test_utt_id, trial.type, score});
    }
  } else {
    const gmm::DiagonalGmm ubm =
        gmm::DiagonalGmm::ReadFile(layout.UbmFile(feature, h));
    const ivector::TotalVariabilityModel tv =
        ivector::TotalVariabilityModel::ReadFile(layout.TvFile(feature, h));
    const ivector::SphericalNorm snorm =
        ivector::SphericalNorm::ReadFile(layout.SnormFile(feature, h));
    const ivector::PldaModel plda =
        ivector::PldaModel::ReadFile(layout.PldaFile(feature, h));
    const ivector::PldaScorer scorer(plda);
    const auto enrolled = ReadEnrollVectors(layout.EnrollVecFile(feature, h));
    std::map<std::string, Eigen::VectorXd> cache;
    for (const auto &trial : data.trials.trials) {
      auto it = cache.find(trial.test_utt_id);
      if (it == cache.end())
        it = cache
                 .emplace(trial.test_utt_id,
                          snorm.Apply(ivector::ExtractIvector(
                              ivector::AccumulateBwStats(
                                  ubm, test_feature(trial.test_utt_id)),
                              tv)))
                 .first;
      const auto vec = enrolled.find(trial.model_id);
      if (vec == enrolled.end())
        throw DataError("score: no enrolled model " + trial.model_id);
      set.entries.push_back({trial.model_id, trial.test_utt_id, trial.type,
                             scorer.Score(vec->second, it->second)});
    }
  }

  EnsureDir(layout.ScoresDir(feature, h));
  eval::WriteScoreFile(out, set);
  return true;
}

bool StageEvaluate(const ExperimentConfig &cfg, const std::string &score_path,
                   const std::string &report_path, const std::string &det_path,
                   const std::string &system_id, bool force) {
  if (!force && !NeedsRebuild({report_path, det_path}, {score_path}))
    return false;
  const eval::ScoreSet set = eval::ReadScoreFile(score_path, system_id);
  const eval::EvaluationReport report = eval::EvaluateTrials(set, cfg.dcf);
  eval::WriteReportFile(report_path, report);
  eval::WriteDetCsv(det_path, set);
  return true;
}

bool StageFuseFeature(const ExperimentConfig &cfg, const Layout &layout,
                      const std::string &feature, bool force) {
  std::vector<std::string> inputs;
  inputs.reserve(cfg.grid.size());
  for (int h : cfg.grid) inputs.push_back(layout.ScoreFile(feature, h));
  const std::string out = layout.FusedScoreFile(feature);
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  std::vector<eval::ScoreSet> systems;
  systems.reserve(cfg.grid.size());
  for (int h : cfg.grid)
    systems.push_back(eval::ReadScoreFile(
        layout.ScoreFile(feature, h), feature + "-" + Layout::AlphaName(h)));
  EnsureDir(layout.FusedDir(feature));
  eval::WriteScoreFile(out, eval::FuseScores(systems));
  return true;
}

bool StageFuseAll(const ExperimentConfig &cfg, const Layout &layout,
                  bool force) {
  std::vector<std::string> inputs;
  for (const auto &feature : cfg.features)
    for (int h : cfg.grid) inputs.push_back(layout.ScoreFile(feature, h));
  const std::string out = layout.CrossScoreFile();
  if (!force && !NeedsRebuild({out}, inputs)) return false;

  std::vector<eval::ScoreSet> systems;
  systems.reserve(inputs.size());
  for (const auto &feature : cfg.features)
    for (int h : cfg.grid)
      systems.push_back(eval::ReadScoreFile(
          layout.ScoreFile(feature, h), feature + "-" + Layout::AlphaName(h)));
  EnsureDir(layout.CrossDir());
  eval::WriteScoreFile(out, eval::FuseScores(systems));
  return true;
}

namespace {

std::string StageTag(const std::string &stage, const std::string &feature,
                     int h) {
  std::string tag = "[" + stage;
  if (!feature.empty()) tag += " " + feature;
  if (h >= 0) tag += " " + Layout::AlphaName(h);
  return tag + "] ";
}

}  // namespace

RunSummary RunExperiment(const ExperimentConfig &cfg, bool force) {
  cfg.Validate();
  const Layout layout{cfg.out_dir};
  const CorpusData data = LoadCorpusData(cfg.corpus_dir);

  RunSummary summary;
  std::atomic<int> ran{0}, skipped{0};
  auto tally = [&](bool did_run) { (did_run ? ran : skipped).fetch_add(1); };
  auto wrap = [](const std::string &stage, const std::string &feature, int h,
                 auto &&fn) {
    try {
      return fn();
    } catch (const Error &e) {
      throw Error(e.exit_code(), StageTag(stage, feature, h) + e.what());
    }
  };

  {
    // Queue workers carry the parallelism; kernels run single threaded so
    // `workers` bounds the total CPU footprint.
    OmpScope omp(cfg.workers > 1);

    tally(wrap("extract", "mfcc", -1, [&] {
      return StageExtractMfcc(cfg, layout, data, cfg.grid, force,
                              cfg.workers);
    }));

    std::vector<std::function<void()>> items;
    for (const auto &feature : cfg.features) {
      for (int h : cfg.grid) {
        items.push_back([&, feature, h] {
          if (feature == "spk-bn") {
            tally(wrap("train-spkbn", feature, h, [&] {
              return StageTrainSpkBn(cfg, layout, data, h, force);
            }));
          }
          if (feature == "apc-bn") {
            tally(wrap("train-apc", feature, h, [&] {
              return StageTrainApc(cfg, layout, data, h, force);
            }));
          }
          if (feature != "mfcc") {
            tally(wrap("fit-pca", feature, h, [&] {
              return StageFitPca(cfg, layout, data, feature, h, force);
            }));
            tally(wrap("extract", feature, h, [&] {
              return StageExtractBn(cfg, layout, data, feature, h, force);
            }));
          }
          tally(wrap("train-ubm", feature, h, [&] {
            return StageTrainUbm(cfg, layout, data, feature, h, force);
          }));
          if (cfg.backend == "ivector") {
            tally(wrap("train-tv", feature, h, [&] {
              return StageTrainTv(cfg, layout, data, feature, h, force);
            }));
            tally(wrap("train-plda", feature, h, [&] {
              return StageTrainPlda(cfg, layout, data, feature, h, force);
            }));
          }
          tally(wrap("enroll", feature, h, [&] {
            return StageEnroll(cfg, layout, data, feature, h, force);
          }));
          tally(wrap("score", feature, h, [&] {
            return StageScore(cfg, layout, data, feature, h, force);
          }));
          tally(wrap("evaluate", feature, h, [&] {
            return StageEvaluate(cfg, layout.ScoreFile(feature, h),
                                 layout.ReportFile(feature, h),
                                 layout.DetFile(feature, h),
                                 feature + "-" + Layout::AlphaName(h), force);
          }));
        });
      }
    }
    RunQueue(cfg.workers, items);
  }

  for (const auto &feature : cfg.features) {
    for (int h : cfg.grid) summary.reports.push_back(layout.ReportFile(feature, h));
    tally(wrap("fuse", feature, -1,
               [&] { return StageFuseFeature(cfg, layout, feature, force); }));
    tally(wrap("evaluate", feature + " fused", -1, [&] {
      return StageEvaluate(cfg, layout.FusedScoreFile(feature),
                           layout.FusedReportFile(feature),
                           layout.FusedDetFile(feature), feature + "-fused",
                           force);
    }));
    summary.reports.push_back(layout.FusedReportFile(feature));
  }
  if (cfg.features.size() > 1) {
    tally(wrap("fuse", "all", -1,
               [&] { return StageFuseAll(cfg, layout, force); }));
    tally(wrap("evaluate", "all fused", -1, [&] {
      return StageEvaluate(cfg, layout.CrossScoreFile(),
                           layout.CrossReportFile(), layout.CrossDetFile(),
                           "fused-all", force);
    }));
    summary.reports.push_back(layout.CrossReportFile());
  }

  summary.ran = ran.load();
  summary.skipped = skipped.load();
  return summary;
}

corpus::CorpusSummary SynthCorpusChecked(const corpus::CorpusConfig &config,
                                         const std::string &out_dir,
                                         bool force) {
  if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
    if (!force)
      throw DataError("corpus directory " + out_dir +
                      " already exists and is not empty (use --force to "
                      "regenerate)");
    fs::remove_all(out_dir);
  }
  return corpus::SynthCorpus(config, out_dir);
}

}  // namespace cli
}  // namespace vsv
