// core/common.cpp

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

#include "vsv/core/common.hpp"

#include <iostream>

namespace vsv {
namespace logging {

// Quiet by default: Info is opt-in diagnostics, warnings always print.
namespace {
bool g_verbose = false;
}  // namespace

void Warn(const std::string &msg) {
  std::cerr << "vsv: warning: " << msg << std::endl;
}

void Info(const std::string &msg) {
  if (g_verbose) std::cerr << "vsv: " << msg << std::endl;
}

void SetVerbose(bool verbose) { g_verbose = verbose; }

bool Verbose() { return g_verbose; }

}  // namespace logging
}  // namespace vsv
