// tests/test_util.hpp

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

#ifndef VSV_TESTS_TEST_UTIL_HPP_
#define VSV_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace vsv_test {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("vsv_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::string Path(const std::string &rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline std::vector<char> SlurpBytes(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  return std::vector<char>((std::istreambuf_iterator<char>(is)),
                           std::istreambuf_iterator<char>());
}

inline void SpewBytes(const std::string &path, const std::vector<char> &b) {
  std::ofstream os(path, std::ios::binary);
  os.write(b.data(), static_cast<std::streamsize>(b.size()));
}

}  // namespace vsv_test

#endif  // VSV_TESTS_TEST_UTIL_HPP_
