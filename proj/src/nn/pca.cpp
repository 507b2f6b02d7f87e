// vsv/nn/pca.cpp

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

#include "vsv/nn/pca.hpp"

#include <string>

#include "vsv/core/common.hpp"
#include "vsv/nn/nn_io.hpp"

namespace vsv {
namespace nn {

void PcaProjection::Validate() const {
  if (basis.rows() == 0 || basis.cols() == 0)
    throw DataError("pca: empty basis");
  if (mean.size() != basis.rows())
    throw DataError("pca: mean dimension does not match basis rows");
  if (explained.size() != basis.cols())
    throw DataError("pca: explained-variance size does not match basis cols");
  if (!basis.allFinite() || !mean.allFinite() || !explained.allFinite())
    throw NumericError("pca: non-finite parameters");
  Eigen::MatrixXd gram = basis.transpose() * basis;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > 1e-8)
    throw NumericError("pca: basis columns are not orthonormal");
}

PcaProjection FitPca(const Eigen::MatrixXd &frames, Eigen::Index out_dim) {
  const Eigen::Index dim = frames.rows();
  const Eigen::Index n = frames.cols();
  if (out_dim < 1) throw DataError("pca: output dimension must be positive");
  if (out_dim > dim)
    throw DataError("pca: output dimension " + std::to_string(out_dim) +
                    " exceeds input dimension " + std::to_string(dim));
  if (n <= out_dim)
    throw DataError("pca: need more than " + std::to_string(out_dim) +
                    " frames, got " + std::to_string(n));

  PcaProjection pca;
  pca.mean = frames.rowwise().mean();
  Eigen::MatrixXd centered = frames.colwise() - pca.mean;
  Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw NumericError("pca: eigendecomposition failed");

  // Eigen returns eigenvalues ascending; walk them from the back.
  const Eigen::VectorXd &values = eig.eigenvalues();
  const double max_eig = values(dim - 1);
  const double rank_tol = max_eig * 1e-9;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (values(i) > rank_tol) ++rank;
  if (rank < out_dim)
    throw DataError("pca: data rank " + std::to_string(rank) +
                    " is below the requested " + std::to_string(out_dim) +
                    " dimensions");

  double total = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i)
    total += values(i) > 0.0 ? values(i) : 0.0;

  pca.basis.resize(dim, out_dim);
  pca.explained.resize(out_dim);
  for (Eigen::Index k = 0; k < out_dim; ++k) {
    Eigen::VectorXd column = eig.eigenvectors().col(dim - 1 - k);
    // Deterministic sign: the largest-magnitude coordinate is positive.
    Eigen::Index argmax = 0;
    column.cwiseAbs().maxCoeff(&argmax);
    if (column(argmax) < 0.0) column = -column;
    pca.basis.col(k) = column;
    pca.explained(k) = values(dim - 1 - k) / total;
  }
  return pca;
}

Eigen::MatrixXd PcaProject(const PcaProjection &pca,
                           const Eigen::MatrixXd &frames) {
  if (frames.rows() != pca.InputDim())
    throw DataError("pca: input dimension " + std::to_string(frames.rows()) +
                    " does not match projection dimension " +
                    std::to_string(pca.InputDim()));
  return pca.basis.transpose() * (frames.colwise() - pca.mean);
}

void PcaProjection::WriteFile(const std::string &path) const {
  Validate();
  NetworkFile file;
  file.kind = "pca";
  file.meta["input_dim"] = std::to_string(InputDim());
  file.meta["output_dim"] = std::to_string(OutputDim());
  file.blocks = {mean, basis, explained};
  WriteNetworkFile(path, file);
}

PcaProjection PcaProjection::ReadFile(const std::string &path) {
  NetworkFile file = ReadNetworkFile(path, "pca");
  if (file.blocks.size() != 3)
    throw DataError("pca file " + path + " has wrong block count");
  if (file.blocks[0].cols() != 1 || file.blocks[2].cols() != 1)
    throw DataError("pca file " + path + " has malformed vector blocks");
  PcaProjection pca;
  pca.mean = file.blocks[0];
  pca.basis = file.blocks[1];
  pca.explained = file.blocks[2];
  pca.Validate();
  return pca;
}

}  // namespace nn
}  // namespace vsv
