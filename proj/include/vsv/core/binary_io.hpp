// vsv/core/binary_io.hpp

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

#ifndef VSV_CORE_BINARY_IO_HPP_
#define VSV_CORE_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "vsv/core/common.hpp"

// All container formats are little-endian on disk.  Supporting big-endian
// hosts would need byte swapping here; until one shows up we simply refuse
// to compile there.
static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

namespace vsv {
namespace io {

template <typename T>
void WriteScalar(std::ostream &os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char *>(&value), sizeof(T));
  if (!os) throw DataError("binary write failed");
}

template <typename T>
T ReadScalar(std::istream &is, const std::string &what) {
  static_assert(std::is_trivially_copyable_v<T>);
  T value;
  is.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!is) throw DataError("truncated input while reading " + what);
  return value;
}

inline void WriteString(std::ostream &os, const std::string &s) {
  WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!os) throw DataError("binary write failed");
}

inline std::string ReadString(std::istream &is, const std::string &what) {
  auto len = ReadScalar<std::uint32_t>(is, what + " length");
  if (len > (1u << 20)) throw DataError("implausible string length in " + what);
  std::string s(len, '\0');
  is.read(s.data(), static_cast<std::streamsize>(len));
  if (!is) throw DataError("truncated input while reading " + what);
  return s;
}

// Containers open with a four-byte magic and a u16 format version.
inline void WriteMagic(std::ostream &os, const char magic[5],
                       std::uint16_t version) {
  os.write(magic, 4);
  WriteScalar<std::uint16_t>(os, version);
}

inline std::uint16_t ExpectMagic(std::istream &is, const char magic[5],
                                 const std::string &what) {
  char got[4];
  is.read(got, 4);
  if (!is || got[0] != magic[0] || got[1] != magic[1] || got[2] != magic[2] ||
      got[3] != magic[3]) {
    throw DataError("bad magic: not a " + what + " file");
  }
  return ReadScalar<std::uint16_t>(is, what + " version");
}

// Dense payloads are stored row-major as f64 (f32 variants for features).

inline void WriteVector(std::ostream &os, const Eigen::VectorXd &v) {
  WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(v.size()));
  os.write(reinterpret_cast<const char *>(v.data()),
           static_cast<std::streamsize>(sizeof(double) * v.size()));
  if (!os) throw DataError("binary write failed");
}

inline Eigen::VectorXd ReadVector(std::istream &is, const std::string &what) {
  auto n = ReadScalar<std::uint32_t>(is, what + " size");
  if (n > (1u << 28)) throw DataError("implausible vector size in " + what);
  Eigen::VectorXd v(n);
  is.read(reinterpret_cast<char *>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  if (!is) throw DataError("truncated input while reading " + what);
  return v;
}

using RowMajorMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline void WriteMatrix(std::ostream &os, const Eigen::MatrixXd &m) {
  WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  WriteScalar<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  RowMajorMatrixXd tmp = m;
  os.write(reinterpret_cast<const char *>(tmp.data()),
           static_cast<std::streamsize>(sizeof(double) * tmp.size()));
  if (!os) throw DataError("binary write failed");
}

inline Eigen::MatrixXd ReadMatrix(std::istream &is, const std::string &what) {
  auto rows = ReadScalar<std::uint32_t>(is, what + " rows");
  auto cols = ReadScalar<std::uint32_t>(is, what + " cols");
  if (static_cast<std::uint64_t>(rows) * cols > (1ull << 31))
    throw DataError("implausible matrix size in " + what);
  RowMajorMatrixXd tmp(rows, cols);
  is.read(reinterpret_cast<char *>(tmp.data()),
          static_cast<std::streamsize>(sizeof(double) * tmp.size()));
  if (!is) throw DataError("truncated input while reading " + what);
  return tmp;
}

inline std::ofstream OpenOut(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  return os;
}

inline std::ifstream OpenIn(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open for reading: " + path);
  return is;
}

}  // namespace io
}  // namespace vsv

#endif  // VSV_CORE_BINARY_IO_HPP_
