// ivector/plda.cpp

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

#include "vsv/ivector/plda.hpp"

#include <cmath>
#include <map>

#include "vsv/core/binary_io.hpp"
#include "vsv/core/common.hpp"

namespace vsv {
namespace ivector {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double LogDetFromLlt(const Eigen::LLT<Eigen::MatrixXd> &llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void CheckSymmetric(const Eigen::MatrixXd &m, const std::string &what) {
  double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (scale + 1.0))
    throw NumericError("plda: " + what + " is not symmetric");
}

// Per-class sufficient statistics.  The within-class scatter pools across
// classes because the model shares one W.
struct Grouped {
  Eigen::VectorXd counts;   // C
  Eigen::MatrixXd means;    // R x C
  Eigen::MatrixXd scatter;  // R x R, sum of (x - mean_c)(x - mean_c)'
  Eigen::Index total = 0;
};

Grouped GroupByLabel(const Eigen::MatrixXd &vectors,
                     const std::vector<int> &labels) {
  if (vectors.cols() == 0) throw DataError("plda: no training vectors");
  if (static_cast<Eigen::Index>(labels.size()) != vectors.cols())
    throw DataError("plda: label count does not match vector count");

  std::map<int, Eigen::Index> index;
  for (int label : labels) index.emplace(label, 0);
  Eigen::Index next = 0;
  for (auto &entry : index) entry.second = next++;

  const auto r = vectors.rows();
  const auto c = next;
  if (c < 2) throw DataError("plda: need at least two classes");

  Grouped g;
  g.counts = Eigen::VectorXd::Zero(c);
  g.means = Eigen::MatrixXd::Zero(r, c);
  g.total = vectors.cols();
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index cls = index.at(labels[static_cast<std::size_t>(j)]);
    g.counts(cls) += 1.0;
    g.means.col(cls) += vectors.col(j);
  }
  if (g.counts.maxCoeff() < 2.0)
    throw DataError(
        "plda: every class is a singleton, between covariance unidentifiable");
  for (Eigen::Index cls = 0; cls < c; ++cls) g.means.col(cls) /= g.counts(cls);

  g.scatter = Eigen::MatrixXd::Zero(r, r);
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index cls = index.at(labels[static_cast<std::size_t>(j)]);
    Eigen::VectorXd dev = vectors.col(j) - g.means.col(cls);
    g.scatter.noalias() += dev * dev.transpose();
  }
  return g;
}

// Exact marginal log likelihood from grouped stats: class centers are
// integrated out, giving N(mean_c; mu, B + W/n_c) per class plus the pooled
// within-class term.  Factorizations are cached per distinct class size.
double MarginalFromGroups(const PldaModel &model, const Grouped &g) {
  const auto r = model.Dim();
  Eigen::LLT<Eigen::MatrixXd> llt_w(model.w);
  if (llt_w.info() != Eigen::Success)
    throw NumericError("plda: within covariance not positive definite");
  double logdet_w = LogDetFromLlt(llt_w);

  double ll = -0.5 * (llt_w.solve(g.scatter)).trace();
  std::map<long, std::pair<Eigen::LLT<Eigen::MatrixXd>, double>> cache;
  for (Eigen::Index cls = 0; cls < g.counts.size(); ++cls) {
    double n = g.counts(cls);
    long key = std::lround(n);
    auto it = cache.find(key);
    if (it == cache.end()) {
      Eigen::LLT<Eigen::MatrixXd> llt(model.b + model.w / n);
      if (llt.info() != Eigen::Success)
        throw NumericError("plda: class-mean covariance not positive definite");
      double logdet = LogDetFromLlt(llt);
      it = cache.emplace(key, std::make_pair(std::move(llt), logdet)).first;
    }
    Eigen::VectorXd dev = g.means.col(cls) - model.mu;
    ll += -0.5 * static_cast<double>(r) * kLog2Pi - 0.5 * it->second.second -
          0.5 * dev.dot(it->second.first.solve(dev));
    ll += -0.5 * (n - 1.0) * static_cast<double>(r) * kLog2Pi -
          0.5 * (n - 1.0) * logdet_w -
          0.5 * static_cast<double>(r) * std::log(n);
  }
  return ll;
}

}  // namespace

void PldaModel::Validate() const {
  const auto r = Dim();
  if (r == 0) throw DataError("plda: empty model");
  if (b.rows() != r || b.cols() != r || w.rows() != r || w.cols() != r)
    throw DataError("plda: covariance shape mismatch");
  if (!mu.allFinite() || !b.allFinite() || !w.allFinite())
    throw NumericError("plda: non-finite parameters");
  CheckSymmetric(b, "between covariance");
  CheckSymmetric(w, "within covariance");
  Eigen::LLT<Eigen::MatrixXd> llt_w(w);
  if (llt_w.info() != Eigen::Success)
    throw NumericError("plda: within covariance not positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() < -1e-8 * (scale + 1.0))
    throw NumericError("plda: between covariance not positive semi-definite");
}

void PldaModel::WriteFile(const std::string &path) const {
  Validate();
  std::ofstream os = io::OpenOut(path);
  io::WriteMagic(os, "VSVP", 1);
  io::WriteVector(os, mu);
  io::WriteMatrix(os, b);
  io::WriteMatrix(os, w);
}

PldaModel PldaModel::ReadFile(const std::string &path) {
  std::ifstream is = io::OpenIn(path);
  if (io::ExpectMagic(is, "VSVP", path) != 1)
    throw DataError(path + ": unsupported scoring container version");
  PldaModel model;
  model.mu = io::ReadVector(is, "global mean");
  model.b = io::ReadMatrix(is, "between covariance");
  model.w = io::ReadMatrix(is, "within covariance");
  model.Validate();
  return model;
}

PldaTrainResult TrainPlda(const Eigen::MatrixXd &vectors,
                          const std::vector<int> &labels,
                          const PldaTrainConfig &config) {
  if (config.iterations < 1) throw ConfigError("plda: iterations < 1");
  Grouped g = GroupByLabel(vectors, labels);
  const auto r = vectors.rows();
  const auto c = g.counts.size();
  const double n_total = static_cast<double>(g.total);

  // Moment initialization with a trace-scaled ridge so both covariances are
  // invertible even when classes are few or data is degenerate.
  PldaModel model;
  model.mu = vectors.rowwise().mean();
  Eigen::MatrixXd centered = vectors.colwise() - model.mu;
  double total_trace =
      (centered * centered.transpose() / n_total).trace();
  double lambda =
      std::max(config.ridge * total_trace, 1e-10) / static_cast<double>(r);

  model.w = g.scatter / n_total +
            lambda * Eigen::MatrixXd::Identity(r, r);
  Eigen::MatrixXd mean_dev = g.means.colwise() - model.mu;
  model.b = mean_dev * mean_dev.transpose() / static_cast<double>(c) +
            lambda * Eigen::MatrixXd::Identity(r, r);

  PldaTrainResult result;
  for (int it = 0; it < config.iterations; ++it) {
    result.objective.push_back(MarginalFromGroups(model, g));

    Eigen::LLT<Eigen::MatrixXd> llt_b(model.b);
    Eigen::LLT<Eigen::MatrixXd> llt_w(model.w);
    if (llt_b.info() != Eigen::Success || llt_w.info() != Eigen::Success)
      throw NumericError("plda: covariance lost positive definiteness");
    Eigen::MatrixXd binv = llt_b.solve(Eigen::MatrixXd::Identity(r, r));
    Eigen::MatrixXd winv = llt_w.solve(Eigen::MatrixXd::Identity(r, r));
    Eigen::VectorXd binv_mu = binv * model.mu;

    // Posterior covariance depends on the class only through its size.
    std::map<long, Eigen::MatrixXd> cov_cache;
    Eigen::MatrixXd centers(r, c);   // posterior means
    Eigen::MatrixXd cov_sum = Eigen::MatrixXd::Zero(r, r);
    Eigen::MatrixXd cov_sum_n = Eigen::MatrixXd::Zero(r, r);
    for (Eigen::Index cls = 0; cls < c; ++cls) {
      double n = g.counts(cls);
      long key = std::lround(n);
      auto it_cov = cov_cache.find(key);
      if (it_cov == cov_cache.end()) {
        Eigen::MatrixXd precision = binv + n * winv;
        Eigen::LLT<Eigen::MatrixXd> llt_p(precision);
        if (llt_p.info() != Eigen::Success)
          throw NumericError("plda: posterior precision not positive definite");
        it_cov = cov_cache
                     .emplace(key,
                              llt_p.solve(Eigen::MatrixXd::Identity(r, r)))
                     .first;
      }
      const Eigen::MatrixXd &cov = it_cov->second;
      centers.col(cls) = cov * (binv_mu + n * (winv * g.means.col(cls)));
      cov_sum += cov;
      cov_sum_n += n * cov;
    }

    model.mu = centers.rowwise().mean();
    Eigen::MatrixXd center_dev = centers.colwise() - model.mu;
    model.b = (cov_sum + center_dev * center_dev.transpose()) /
              static_cast<double>(c);
    Eigen::MatrixXd resid = g.means - centers;
    model.w = (g.scatter + cov_sum_n +
               resid * g.counts.asDiagonal() * resid.transpose()) /
              n_total;
    model.b = ((model.b + model.b.transpose()) / 2.0).eval();
    model.w = ((model.w + model.w.transpose()) / 2.0).eval();
  }

  model.Validate();
  result.model = std::move(model);
  return result;
}

double PldaMarginalLogLik(const PldaModel &model,
                          const Eigen::MatrixXd &vectors,
                          const std::vector<int> &labels) {
  model.Validate();
  if (vectors.rows() != model.Dim())
    throw DataError("plda: vector dimension does not match model");
  if (vectors.cols() == 0) throw DataError("plda: no vectors");
  if (static_cast<Eigen::Index>(labels.size()) != vectors.cols())
    throw DataError("plda: label count does not match vector count");

  // Reuse the grouped path, but without the two-class training requirement.
  std::map<int, std::vector<Eigen::Index>> classes;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j)
    classes[labels[static_cast<std::size_t>(j)]].push_back(j);

  Grouped g;
  g.counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes.size()));
  g.means = Eigen::MatrixXd::Zero(vectors.rows(),
                                  static_cast<Eigen::Index>(classes.size()));
  g.scatter = Eigen::MatrixXd::Zero(vectors.rows(), vectors.rows());
  g.total = vectors.cols();
  Eigen::Index cls = 0;
  for (const auto &entry : classes) {
    for (Eigen::Index j : entry.second) g.means.col(cls) += vectors.col(j);
    g.counts(cls) = static_cast<double>(entry.second.size());
    g.means.col(cls) /= g.counts(cls);
    for (Eigen::Index j : entry.second) {
      Eigen::VectorXd dev = vectors.col(j) - g.means.col(cls);
      g.scatter.noalias() += dev * dev.transpose();
    }
    ++cls;
  }
  return MarginalFromGroups(model, g);
}

PldaScorer::PldaScorer(const PldaModel &model) {
  model.Validate();
  mu_ = model.mu;
  sum_.compute(2.0 * model.b + model.w);
  within_.compute(model.w);
  total_.compute(model.b + model.w);
  if (sum_.info() != Eigen::Success || within_.info() != Eigen::Success ||
      total_.info() != Eigen::Success)
    throw NumericError("plda: scoring covariances not positive definite");
  logdet_term_ = 0.5 * (2.0 * LogDetFromLlt(total_) - LogDetFromLlt(sum_) -
                        LogDetFromLlt(within_));
}

double PldaScorer::Score(const Eigen::VectorXd &enroll,
                         const Eigen::VectorXd &test) const {
  if (enroll.size() != mu_.size() || test.size() != mu_.size())
    throw DataError("plda: trial vector dimension mismatch");
  // In the rotated pair coordinates s = (u+v)/sqrt(2), d = (u-v)/sqrt(2)
  // both hypothesis Gaussians factor: same-class covariance becomes
  // diag(2B+W, W), different-class becomes diag(B+W, B+W).
  const double inv_sqrt2 = 0.70710678118654752440;
  Eigen::VectorXd s = (enroll + test - 2.0 * mu_) * inv_sqrt2;
  Eigen::VectorXd d = (enroll - test) * inv_sqrt2;
  return logdet_term_ - 0.5 * s.dot(sum_.solve(s)) -
         0.5 * d.dot(within_.solve(d)) + 0.5 * s.dot(total_.solve(s)) +
         0.5 * d.dot(total_.solve(d));
}

}  // namespace ivector
}  // namespace vsv
