// ivector/tmatrix.cpp

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

#include "vsv/ivector/tmatrix.hpp"

#include <cmath>

#include "vsv/core/binary_io.hpp"
#include "vsv/core/common.hpp"
#include "vsv/core/parallel.hpp"
#include "vsv/core/rng.hpp"

namespace vsv {
namespace ivector {

void TotalVariabilityModel::Validate() const {
  if (num_components <= 0) throw DataError("tv: zero components");
  if (m.size() == 0 || m.size() % num_components != 0)
    throw DataError("tv: supervector size not divisible by components");
  if (sigma.size() != m.size() || t.rows() != m.size())
    throw DataError("tv: inconsistent shapes");
  if (t.cols() < 1 || t.cols() > t.rows())
    throw DataError("tv: rank must be in [1, K*D]");
  if ((sigma.array() <= 0.0).any())
    throw NumericError("tv: non-positive variance");
  if (!m.allFinite() || !t.allFinite())
    throw NumericError("tv: non-finite parameters");
}

void TotalVariabilityModel::WriteFile(const std::string &path) const {
  Validate();
  std::ofstream os = io::OpenOut(path);
  io::WriteMagic(os, "VSVT", 1);
  io::WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(num_components));
  io::WriteVector(os, m);
  io::WriteVector(os, sigma);
  io::WriteMatrix(os, t);
}

TotalVariabilityModel TotalVariabilityModel::ReadFile(const std::string &path) {
  std::ifstream is = io::OpenIn(path);
  if (io::ExpectMagic(is, "VSVT", path) != 1)
    throw DataError(path + ": unsupported subspace container version");
  TotalVariabilityModel tv;
  tv.num_components = io::ReadScalar<std::uint32_t>(is, "component count");
  tv.m = io::ReadVector(is, "supervector mean");
  tv.sigma = io::ReadVector(is, "supervector variance");
  tv.t = io::ReadMatrix(is, "subspace");
  tv.Validate();
  return tv;
}

namespace {

// Per-component Gram matrices G_k = T_k' Sigma_k^-1 T_k let each utterance
// assemble its posterior precision as I + sum_k n_k G_k instead of touching
// the full supervector dimension.
struct TvWorkspace {
  Eigen::MatrixXd tsig;                // (K*D) x R, Sigma^-1 T
  std::vector<Eigen::MatrixXd> gram;   // K matrices, R x R
};

TvWorkspace BuildWorkspace(const TotalVariabilityModel &tv) {
  const auto d = tv.Dim();
  TvWorkspace ws;
  ws.tsig = tv.sigma.cwiseInverse().asDiagonal() * tv.t;
  ws.gram.resize(static_cast<std::size_t>(tv.num_components));
  for (Eigen::Index k = 0; k < tv.num_components; ++k) {
    ws.gram[static_cast<std::size_t>(k)] =
        tv.t.middleRows(k * d, d).transpose() * ws.tsig.middleRows(k * d, d);
  }
  return ws;
}

Eigen::VectorXd FlattenStats(const BaumWelchStats &stats) {
  const auto k = stats.NumComponents();
  const auto d = stats.Dim();
  Eigen::VectorXd f(k * d);
  for (Eigen::Index c = 0; c < k; ++c)
    f.segment(c * d, d) = stats.f.row(c).transpose();
  return f;
}

struct TvPosterior {
  Eigen::VectorXd w;       // posterior mean
  Eigen::MatrixXd second;  // L^-1 + w w', only when requested
  double objective = 0.0;  // (b . w - logdet L) / 2
};

TvPosterior PosteriorMoments(const BaumWelchStats &stats,
                             const TvWorkspace &ws, Eigen::Index rank,
                             bool need_second) {
  Eigen::MatrixXd precision =
      Eigen::MatrixXd::Identity(rank, rank);
  for (Eigen::Index k = 0; k < stats.NumComponents(); ++k) {
    if (stats.n(k) != 0.0)
      precision.noalias() += stats.n(k) * ws.gram[static_cast<std::size_t>(k)];
  }
  Eigen::VectorXd b = ws.tsig.transpose() * FlattenStats(stats);

  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw NumericError("tv: posterior precision not positive definite");

  TvPosterior post;
  post.w = llt.solve(b);
  double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  post.objective = 0.5 * (b.dot(post.w) - logdet);
  if (need_second) {
    post.second = llt.solve(Eigen::MatrixXd::Identity(rank, rank));
    post.second.noalias() += post.w * post.w.transpose();
  }
  return post;
}

void CheckStatsAgainstModel(const BaumWelchStats &stats,
                            const TotalVariabilityModel &tv) {
  if (stats.NumComponents() != tv.num_components || stats.Dim() != tv.Dim())
    throw DataError("tv: stats shape does not match model");
  if (!stats.n.allFinite() || !stats.f.allFinite())
    throw NumericError("tv: non-finite stats");
}

}  // namespace

TvTrainResult TrainTv(const std::vector<BaumWelchStats> &stats,
                      const gmm::DiagonalGmm &ubm,
                      const TvTrainConfig &config) {
  ubm.Validate();
  if (stats.empty()) throw DataError("tv: no training stats");
  const auto k = ubm.NumComponents();
  const auto d = ubm.Dim();
  const auto kd = k * d;
  if (config.rank < 1 || config.rank > kd)
    throw ConfigError("tv: rank must be in [1, K*D]");
  if (config.iterations < 1) throw ConfigError("tv: iterations < 1");
  if (static_cast<Eigen::Index>(stats.size()) < config.rank)
    logging::Warn("tv: fewer utterances than subspace dimensions");

  TotalVariabilityModel tv;
  tv.num_components = k;
  tv.m.resize(kd);
  tv.sigma.resize(kd);
  for (Eigen::Index c = 0; c < k; ++c) {
    tv.m.segment(c * d, d) = ubm.means.row(c).transpose();
    tv.sigma.segment(c * d, d) = ubm.vars.row(c).transpose();
  }
  for (const BaumWelchStats &s : stats) CheckStatsAgainstModel(s, tv);

  // Small seeded noise breaks the symmetry of the zero solution; the scale
  // keeps early posteriors well inside the prior.
  Rng rng(Rng::Mix(config.seed, Rng::HashBytes("tv-init")));
  double scale = 0.01 * std::sqrt(tv.sigma.mean());
  tv.t.resize(kd, config.rank);
  for (Eigen::Index i = 0; i < kd; ++i)
    for (Eigen::Index j = 0; j < config.rank; ++j)
      tv.t(i, j) = scale * rng.Normal();

  const auto r = static_cast<Eigen::Index>(config.rank);
  const auto u = static_cast<std::int64_t>(stats.size());
  TvTrainResult result;

  for (int it = 0; it < config.iterations; ++it) {
    TvWorkspace ws = BuildWorkspace(tv);

    std::vector<Eigen::MatrixXd> a(
        static_cast<std::size_t>(k), Eigen::MatrixXd::Zero(r, r));
    Eigen::MatrixXd c_acc = Eigen::MatrixXd::Zero(kd, r);
    double objective = 0.0;

    // Posteriors are independent per utterance; chunks bound the memory for
    // their second moments, and the chunk-then-merge order keeps the
    // accumulators identical for any thread count.
    const std::int64_t chunk = 64;
    std::vector<TvPosterior> slot(static_cast<std::size_t>(chunk));
    for (std::int64_t begin = 0; begin < u; begin += chunk) {
      std::int64_t len = std::min(chunk, u - begin);
      par::For(len, [&](std::int64_t i) {
        slot[static_cast<std::size_t>(i)] = PosteriorMoments(
            stats[static_cast<std::size_t>(begin + i)], ws, r, true);
      });
      for (std::int64_t i = 0; i < len; ++i) {
        const BaumWelchStats &s = stats[static_cast<std::size_t>(begin + i)];
        const TvPosterior &post = slot[static_cast<std::size_t>(i)];
        objective += post.objective;
        c_acc.noalias() += FlattenStats(s) * post.w.transpose();
        for (Eigen::Index c = 0; c < k; ++c) {
          if (s.n(c) != 0.0)
            a[static_cast<std::size_t>(c)].noalias() += s.n(c) * post.second;
        }
      }
    }
    result.objective.push_back(objective);

    for (Eigen::Index c = 0; c < k; ++c) {
      Eigen::MatrixXd &ak = a[static_cast<std::size_t>(c)];
      double trace = ak.trace();
      if (trace <= 0.0) {
        logging::Warn("tv: component " + std::to_string(c) +
                      " saw no occupancy, leaving its rows");
        continue;
      }
      Eigen::LLT<Eigen::MatrixXd> llt(ak);
      if (llt.info() != Eigen::Success) {
        logging::Warn("tv: singular update for component " +
                      std::to_string(c) + ", applying ridge");
        ak += (config.ridge * trace / static_cast<double>(r)) *
              Eigen::MatrixXd::Identity(r, r);
        llt.compute(ak);
        if (llt.info() != Eigen::Success)
          throw NumericError("tv: update system singular despite ridge");
      }
      tv.t.middleRows(c * d, d) =
          llt.solve(c_acc.middleRows(c * d, d).transpose()).transpose();
    }
  }

  tv.Validate();
  result.model = std::move(tv);
  return result;
}

Eigen::VectorXd ExtractIvector(const BaumWelchStats &stats,
                               const TotalVariabilityModel &tv) {
  tv.Validate();
  CheckStatsAgainstModel(stats, tv);
  TvWorkspace ws = BuildWorkspace(tv);
  return PosteriorMoments(stats, ws, tv.Rank(), false).w;
}

Eigen::MatrixXd ExtractIvectors(const std::vector<BaumWelchStats> &stats,
                                const TotalVariabilityModel &tv) {
  tv.Validate();
  if (stats.empty()) throw DataError("tv: no stats to extract from");
  for (const BaumWelchStats &s : stats) CheckStatsAgainstModel(s, tv);
  TvWorkspace ws = BuildWorkspace(tv);
  Eigen::MatrixXd out(tv.Rank(), static_cast<Eigen::Index>(stats.size()));
  par::For(static_cast<std::int64_t>(stats.size()), [&](std::int64_t i) {
    out.col(static_cast<Eigen::Index>(i)) = PosteriorMoments(
        stats[static_cast<std::size_t>(i)], ws, tv.Rank(), false).w;
  });
  return out;
}

}  // namespace ivector
}  // namespace vsv
