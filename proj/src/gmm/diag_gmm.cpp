// gmm/diag_gmm.cpp

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

#include "vsv/gmm/diag_gmm.hpp"

#include <cmath>

#include "vsv/core/binary_io.hpp"
#include "vsv/core/common.hpp"
#include "vsv/core/parallel.hpp"

namespace vsv {
namespace gmm {

namespace {
constexpr char kMagic[5] = "VSVG";
constexpr std::uint16_t kVersion = 1;
}  // namespace

void DiagonalGmm::Validate(double weight_tol) const {
  const auto k = NumComponents();
  if (k == 0) throw DataError("gmm: zero components");
  if (means.rows() != k || vars.rows() != k || vars.cols() != means.cols())
    throw DataError("gmm: inconsistent shapes");
  if ((vars.array() <= 0.0).any())
    throw NumericError("gmm: non-positive variance");
  if ((weights.array() < 0.0).any())
    throw NumericError("gmm: negative weight");
  if (std::abs(weights.sum() - 1.0) > weight_tol)
    throw NumericError("gmm: weights sum to " + std::to_string(weights.sum()));
}

void DiagonalGmm::WriteFile(const std::string &path) const {
  Validate();
  auto os = io::OpenOut(path);
  io::WriteMagic(os, kMagic, kVersion);
  io::WriteScalar<std::uint32_t>(os,
                                 static_cast<std::uint32_t>(NumComponents()));
  io::WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(Dim()));
  io::WriteVector(os, weights);
  io::WriteMatrix(os, means);
  io::WriteMatrix(os, vars);
}

DiagonalGmm DiagonalGmm::ReadFile(const std::string &path) {
  auto is = io::OpenIn(path);
  auto version = io::ExpectMagic(is, kMagic, "gmm");
  if (version != kVersion)
    throw DataError(path + ": unsupported gmm container version");
  auto k = io::ReadScalar<std::uint32_t>(is, "gmm components");
  auto d = io::ReadScalar<std::uint32_t>(is, "gmm dim");
  DiagonalGmm gmm;
  gmm.weights = io::ReadVector(is, "gmm weights");
  gmm.means = io::ReadMatrix(is, "gmm means");
  gmm.vars = io::ReadMatrix(is, "gmm vars");
  if (gmm.NumComponents() != static_cast<Eigen::Index>(k) ||
      gmm.Dim() != static_cast<Eigen::Index>(d))
    throw DataError(path + ": gmm header does not match payload");
  gmm.Validate();
  return gmm;
}

GmmLogDensity::GmmLogDensity(const DiagonalGmm &gmm) {
  gmm.Validate();
  const auto k = gmm.NumComponents();
  a = gmm.means.cwiseQuotient(gmm.vars);
  b = (-0.5 * gmm.vars.cwiseInverse().array()).matrix();
  c.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double log_weight =
        gmm.weights(i) > 0.0 ? std::log(gmm.weights(i))
                             : -std::numeric_limits<double>::infinity();
    double log_norm =
        -0.5 * (gmm.Dim() * std::log(2.0 * M_PI) +
                gmm.vars.row(i).array().log().sum());
    double mean_term =
        -0.5 * (gmm.means.row(i).array().square() / gmm.vars.row(i).array())
                   .sum();
    c(i) = log_weight + log_norm + mean_term;
  }
}

Eigen::VectorXd LogSumExpColumns(const Eigen::MatrixXd &m) {
  Eigen::VectorXd out(m.cols());
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    double mx = m.col(t).maxCoeff();
    out(t) = mx + std::log((m.col(t).array() - mx).exp().sum());
  }
  return out;
}

Eigen::MatrixXd ComponentLogLik(const GmmLogDensity &density,
                                const Eigen::MatrixXd &frames) {
  if (frames.rows() != density.Dim())
    throw DataError("gmm: frame dim does not match model dim");
  const auto t = frames.cols();
  Eigen::MatrixXd loglik(density.NumComponents(), t);

  // Blocks write disjoint column ranges, so the result is identical at any
  // thread count.
  par::Blocks blocks = par::FixedBlocks(t, 2048);
  par::For(blocks.count, [&](std::int64_t bi) {
    auto begin = blocks.Begin(bi);
    auto len = blocks.End(bi) - begin;
    if (len <= 0) return;
    const auto x = frames.middleCols(begin, len);
    loglik.middleCols(begin, len) =
        ((density.a * x + density.b * x.cwiseProduct(x)).colwise() +
         density.c);
  });
  return loglik;
}

Eigen::VectorXd FrameLogLik(const GmmLogDensity &density,
                            const Eigen::MatrixXd &frames) {
  return LogSumExpColumns(ComponentLogLik(density, frames));
}

double AverageLogLik(const GmmLogDensity &density,
                     const Eigen::MatrixXd &frames) {
  if (frames.cols() == 0) throw DataError("gmm: no frames to score");
  return FrameLogLik(density, frames).mean();
}

double ScoreLlr(const GmmLogDensity &model, const GmmLogDensity &background,
                const Eigen::MatrixXd &frames) {
  if (model.Dim() != background.Dim())
    throw DataError("llr: model dims disagree");
  return AverageLogLik(model, frames) - AverageLogLik(background, frames);
}

}  // namespace gmm

namespace ref {

Eigen::MatrixXd ComponentLogLikSerial(const gmm::DiagonalGmm &gmm,
                                      const Eigen::MatrixXd &frames) {
  const auto k = gmm.NumComponents();
  const auto d = gmm.Dim();
  Eigen::MatrixXd loglik(k, frames.cols());
  for (Eigen::Index t = 0; t < frames.cols(); ++t) {
    for (Eigen::Index i = 0; i < k; ++i) {
      double acc = std::log(gmm.weights(i));
      for (Eigen::Index j = 0; j < d; ++j) {
        double diff = frames(j, t) - gmm.means(i, j);
        acc += -0.5 * (std::log(2.0 * M_PI * gmm.vars(i, j)) +
                       diff * diff / gmm.vars(i, j));
      }
      loglik(i, t) = acc;
    }
  }
  return loglik;
}

double AverageLogLikSerial(const gmm::DiagonalGmm &gmm,
                           const Eigen::MatrixXd &frames) {
  Eigen::MatrixXd loglik = ComponentLogLikSerial(gmm, frames);
  double total = 0.0;
  for (Eigen::Index t = 0; t < loglik.cols(); ++t) {
    double mx = loglik.col(t).maxCoeff();
    total += mx + std::log((loglik.col(t).array() - mx).exp().sum());
  }
  return total / static_cast<double>(frames.cols());
}

}  // namespace ref
}  // namespace vsv
