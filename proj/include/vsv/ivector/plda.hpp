// vsv/ivector/plda.hpp

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

#ifndef VSV_IVECTOR_PLDA_HPP_
#define VSV_IVECTOR_PLDA_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vsv {
namespace ivector {

// Two-covariance model: class center y ~ N(mu, B), observation x ~ N(y, W).
// Full-rank B and W make this equivalent to factorial PLDA with speaker and
// channel subspaces kept at the full vector dimension.
struct PldaModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd b;  // between-class covariance
  Eigen::MatrixXd w;  // within-class covariance

  Eigen::Index Dim() const { return mu.size(); }

  // Symmetry, W positive definite, B positive semi-definite.
  void Validate() const;

  // Container magic "VSVP".
  void WriteFile(const std::string &path) const;
  static PldaModel ReadFile(const std::string &path);
};

struct PldaTrainConfig {
  int iterations = 10;
  double ridge = 1e-6;  // scaled by covariance trace in the initializer
};

struct PldaTrainResult {
  PldaModel model;
  // Exact marginal log likelihood of the training set, evaluated before
  // each update.  Non-decreasing under EM.
  std::vector<double> objective;
};

// EM over class-labelled vectors (one per column).  Needs at least two
// classes and at least one class with two or more samples.
PldaTrainResult TrainPlda(const Eigen::MatrixXd &vectors,
                          const std::vector<int> &labels,
                          const PldaTrainConfig &config = {});

// Exact log p(vectors | labels, model): class centers integrated out, with
// samples of the same label tied to one center.  This is the quantity the
// trainer reports per iteration; exposed for oracle tests.
double PldaMarginalLogLik(const PldaModel &model,
                          const Eigen::MatrixXd &vectors,
                          const std::vector<int> &labels);

// Same/different-class likelihood ratio for a pair of vectors, from the
// closed-form Gaussian integrals.  All solves are precomputed, so scoring a
// trial costs three triangular back-substitutions.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel &model);

  double Score(const Eigen::VectorXd &enroll,
               const Eigen::VectorXd &test) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::LLT<Eigen::MatrixXd> sum_;     // 2B + W
  Eigen::LLT<Eigen::MatrixXd> within_;  // W
  Eigen::LLT<Eigen::MatrixXd> total_;   // B + W
  double logdet_term_ = 0.0;
};

}  // namespace ivector
}  // namespace vsv

#endif  // VSV_IVECTOR_PLDA_HPP_
