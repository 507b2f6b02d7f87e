// vsv/core/parallel.hpp

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

#ifndef VSV_CORE_PARALLEL_HPP_
#define VSV_CORE_PARALLEL_HPP_

#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vsv {
namespace par {

inline int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// n <= 0 selects the runtime default (hardware concurrency).
inline void SetThreads(int n) {
#ifdef _OPENMP
  if (n > 0) {
    omp_set_num_threads(n);
  } else {
    omp_set_num_threads(omp_get_num_procs());
  }
#else
  (void)n;
#endif
}

// Parallel loop over [0, n) with a static schedule.
template <typename F>
void For(std::int64_t n, F &&body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Fixed decomposition of [0, n) into blocks whose count depends only on n,
// never on the thread count.  Reductions that compute one partial per block
// and merge the partials in block order therefore give bitwise identical
// results at any thread count, including one.
struct Blocks {
  std::int64_t n = 0;
  std::int64_t count = 0;
  std::int64_t size = 0;

  std::int64_t Begin(std::int64_t b) const { return b * size; }
  std::int64_t End(std::int64_t b) const {
    std::int64_t e = (b + 1) * size;
    return e < n ? e : n;
  }
};

inline Blocks FixedBlocks(std::int64_t n, std::int64_t target_size = 1024,
                          std::int64_t max_blocks = 512) {
  Blocks blocks;
  blocks.n = n;
  if (n <= 0) return blocks;
  std::int64_t count = (n + target_size - 1) / target_size;
  if (count > max_blocks) count = max_blocks;
  if (count < 1) count = 1;
  blocks.count = count;
  blocks.size = (n + count - 1) / count;
  return blocks;
}

}  // namespace par
}  // namespace vsv

#endif  // VSV_CORE_PARALLEL_HPP_
