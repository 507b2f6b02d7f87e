// vsv/nn/nn_io.hpp

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

#ifndef VSV_NN_NN_IO_HPP_
#define VSV_NN_NN_IO_HPP_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vsv {
namespace nn {

// One container for every network-shaped artifact, magic "VSVN": a kind tag
// ("mlp", "gru", "pca"), a key=value metadata echo, then an ordered list of
// parameter blocks.  The shape table precedes the payload so a reader can
// describe a file without loading it.  Payload is little-endian f64,
// row-major.  Each model type owns the block order; the container itself is
// kind-agnostic.
struct NetworkFile {
  std::string kind;
  std::map<std::string, std::string> meta;
  std::vector<Eigen::MatrixXd> blocks;
};

void WriteNetworkFile(const std::string &path, const NetworkFile &file);

// Throws DataError on bad magic or on a kind other than `expect_kind`
// (pass "" to accept any kind).
NetworkFile ReadNetworkFile(const std::string &path,
                            const std::string &expect_kind);

// Metadata lookups; the integer form throws DataError when the key is
// missing or not an integer.
int MetaInt(const NetworkFile &file, const std::string &key);
std::string MetaString(const NetworkFile &file, const std::string &key);

}  // namespace nn
}  // namespace vsv

#endif  // VSV_NN_NN_IO_HPP_
