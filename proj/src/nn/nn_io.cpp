// vsv/nn/nn_io.cpp

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

#include "vsv/nn/nn_io.hpp"

#include <cstdint>

#include "vsv/core/binary_io.hpp"
#include "vsv/core/common.hpp"

namespace vsv {
namespace nn {

namespace {
constexpr char kMagic[5] = "VSVN";
constexpr std::uint16_t kVersion = 1;
}  // namespace

void WriteNetworkFile(const std::string &path, const NetworkFile &file) {
  auto os = io::OpenOut(path);
  io::WriteMagic(os, kMagic, kVersion);
  io::WriteString(os, file.kind);
  io::WriteScalar<std::uint32_t>(os,
                                 static_cast<std::uint32_t>(file.meta.size()));
  for (const auto &[key, value] : file.meta) {
    io::WriteString(os, key);
    io::WriteString(os, value);
  }
  // Shape table first, payload after, so shapes are readable without
  // touching the parameter bytes.
  io::WriteScalar<std::uint32_t>(
      os, static_cast<std::uint32_t>(file.blocks.size()));
  for (const auto &block : file.blocks) {
    io::WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(block.rows()));
    io::WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(block.cols()));
  }
  for (const auto &block : file.blocks) {
    io::RowMajorMatrixXd tmp = block;
    os.write(reinterpret_cast<const char *>(tmp.data()),
             static_cast<std::streamsize>(sizeof(double) * tmp.size()));
    if (!os) throw DataError("binary write failed: " + path);
  }
}

NetworkFile ReadNetworkFile(const std::string &path,
                            const std::string &expect_kind) {
  auto is = io::OpenIn(path);
  io::ExpectMagic(is, kMagic, "network");
  NetworkFile file;
  file.kind = io::ReadString(is, "network kind");
  if (!expect_kind.empty() && file.kind != expect_kind) {
    throw DataError("network file " + path + " holds a '" + file.kind +
                    "' model, expected '" + expect_kind + "'");
  }
  auto num_meta = io::ReadScalar<std::uint32_t>(is, "meta count");
  if (num_meta > 1024) throw DataError("implausible meta count in " + path);
  for (std::uint32_t i = 0; i < num_meta; ++i) {
    std::string key = io::ReadString(is, "meta key");
    file.meta[key] = io::ReadString(is, "meta value");
  }
  auto num_blocks = io::ReadScalar<std::uint32_t>(is, "block count");
  if (num_blocks > 4096) throw DataError("implausible block count in " + path);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes(num_blocks);
  for (auto &[rows, cols] : shapes) {
    rows = io::ReadScalar<std::uint32_t>(is, "block rows");
    cols = io::ReadScalar<std::uint32_t>(is, "block cols");
    if (static_cast<std::uint64_t>(rows) * cols > (1ull << 31))
      throw DataError("implausible block size in " + path);
  }
  file.blocks.reserve(num_blocks);
  for (const auto &[rows, cols] : shapes) {
    io::RowMajorMatrixXd tmp(rows, cols);
    is.read(reinterpret_cast<char *>(tmp.data()),
            static_cast<std::streamsize>(sizeof(double) * tmp.size()));
    if (!is) throw DataError("truncated network file: " + path);
    file.blocks.emplace_back(tmp);
  }
  return file;
}

int MetaInt(const NetworkFile &file, const std::string &key) {
  auto it = file.meta.find(key);
  if (it == file.meta.end())
    throw DataError("network file lacks meta key '" + key + "'");
  try {
    std::size_t pos = 0;
    int value = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return value;
  } catch (const std::exception &) {
    throw DataError("network meta key '" + key + "' is not an integer: " +
                    it->second);
  }
}

std::string MetaString(const NetworkFile &file, const std::string &key) {
  auto it = file.meta.find(key);
  if (it == file.meta.end())
    throw DataError("network file lacks meta key '" + key + "'");
  return it->second;
}

}  // namespace nn
}  // namespace vsv
