// vsv/core/common.hpp

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

#ifndef VSV_CORE_COMMON_HPP_
#define VSV_CORE_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace vsv {

// Error categories map 1:1 onto CLI exit codes: 2 for configuration
// problems, 3 for bad or missing data, 4 for numeric failures.
class Error : public std::runtime_error {
 public:
  Error(int exit_code, const std::string &msg)
      : std::runtime_error(msg), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string &msg) : Error(2, msg) {}
};

struct DataError : Error {
  explicit DataError(const std::string &msg) : Error(3, msg) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string &msg) : Error(4, msg) {}
};

namespace logging {

// Warnings go to stderr so they never corrupt machine-readable stdout.
void Warn(const std::string &msg);
void Info(const std::string &msg);

// Info messages are suppressed when false; warnings always print.
void SetVerbose(bool verbose);
bool Verbose();

}  // namespace logging

}  // namespace vsv

#endif  // VSV_CORE_COMMON_HPP_
