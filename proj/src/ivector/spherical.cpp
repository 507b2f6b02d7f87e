// ivector/spherical.cpp

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

#include "vsv/ivector/spherical.hpp"

#include <cmath>

#include "vsv/core/binary_io.hpp"
#include "vsv/core/common.hpp"

namespace vsv {
namespace ivector {

namespace {

constexpr double kEigenFloor = 1e-8;

void LengthNormalizeColumns(Eigen::MatrixXd *vectors) {
  for (Eigen::Index j = 0; j < vectors->cols(); ++j) {
    double norm = vectors->col(j).norm();
    if (norm <= 0.0)
      throw NumericError("spherical norm: zero vector cannot be normalized");
    vectors->col(j) /= norm;
  }
}

}  // namespace

Eigen::VectorXd SphericalNorm::Apply(const Eigen::VectorXd &v) const {
  if (means.empty()) throw DataError("spherical norm: transform is empty");
  if (v.size() != Dim())
    throw DataError("spherical norm: dimension mismatch");
  Eigen::VectorXd out = v;
  for (std::size_t i = 0; i < means.size(); ++i) {
    out = transforms[i] * (out - means[i]);
    double norm = out.norm();
    if (norm <= 0.0)
      throw NumericError("spherical norm: zero vector cannot be normalized");
    out /= norm;
  }
  return out;
}

Eigen::MatrixXd SphericalNorm::ApplyAll(const Eigen::MatrixXd &vectors) const {
  Eigen::MatrixXd out(vectors.rows(), vectors.cols());
  for (Eigen::Index j = 0; j < vectors.cols(); ++j)
    out.col(j) = Apply(vectors.col(j));
  return out;
}

void SphericalNorm::WriteFile(const std::string &path) const {
  if (means.empty()) throw DataError("spherical norm: nothing to write");
  std::ofstream os = io::OpenOut(path);
  io::WriteMagic(os, "VSVS", 1);
  io::WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(means.size()));
  for (std::size_t i = 0; i < means.size(); ++i) {
    io::WriteVector(os, means[i]);
    io::WriteMatrix(os, transforms[i]);
  }
}

SphericalNorm SphericalNorm::ReadFile(const std::string &path) {
  std::ifstream is = io::OpenIn(path);
  if (io::ExpectMagic(is, "VSVS", path) != 1)
    throw DataError(path + ": unsupported normalization container version");
  auto iterations = io::ReadScalar<std::uint32_t>(is, "iteration count");
  if (iterations == 0 || iterations > 64)
    throw DataError(path + ": implausible iteration count");
  SphericalNorm norm;
  for (std::uint32_t i = 0; i < iterations; ++i) {
    norm.means.push_back(io::ReadVector(is, "normalization mean"));
    norm.transforms.push_back(io::ReadMatrix(is, "whitening transform"));
    if (norm.transforms.back().rows() != norm.means.back().size() ||
        norm.transforms.back().cols() != norm.means.back().size())
      throw DataError(path + ": whitening shape mismatch");
  }
  return norm;
}

SphericalNorm FitSphericalNorm(const Eigen::MatrixXd &fit_set,
                               int iterations) {
  const auto n = fit_set.cols();
  if (n < 2) throw DataError("spherical norm: need at least two vectors");
  if (iterations < 1)
    throw ConfigError("spherical norm: iterations < 1");

  SphericalNorm norm;
  Eigen::MatrixXd working = fit_set;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd mean = working.rowwise().mean();
    Eigen::MatrixXd centered = working.colwise() - mean;
    Eigen::MatrixXd cov =
        centered * centered.transpose() / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
      throw NumericError("spherical norm: eigen decomposition failed");
    Eigen::VectorXd evals = eig.eigenvalues();
    if ((evals.array() < kEigenFloor).any())
      logging::Warn("spherical norm: covariance floored at " +
                    std::to_string(kEigenFloor));
    evals = evals.cwiseMax(kEigenFloor);
    Eigen::MatrixXd whiten = eig.eigenvectors() *
                             evals.cwiseSqrt().cwiseInverse().asDiagonal() *
                             eig.eigenvectors().transpose();

    norm.means.push_back(mean);
    norm.transforms.push_back(whiten);
    working = whiten * centered;
    LengthNormalizeColumns(&working);
  }
  return norm;
}

Eigen::VectorXd EnrollAverage(const std::vector<Eigen::VectorXd> &ivectors) {
  if (ivectors.empty()) throw DataError("enroll: no session vectors");
  Eigen::VectorXd mean = ivectors[0];
  for (std::size_t i = 1; i < ivectors.size(); ++i) {
    if (ivectors[i].size() != mean.size())
      throw DataError("enroll: session vector dimension mismatch");
    mean += ivectors[i];
  }
  mean /= static_cast<double>(ivectors.size());
  double norm = mean.norm();
  if (norm < 1e-8) throw DataError("enroll: degenerate enrollment");
  return mean / norm;
}

}  // namespace ivector
}  // namespace vsv
