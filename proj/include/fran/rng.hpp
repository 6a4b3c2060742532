/*
   Copyright 2026 The francache Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>

#include "fran/common.hpp"

namespace fran {

// Purpose tags keep the draws for different parts of a realization
// independent of each other and of evaluation order.
enum class StreamTag : std::uint64_t {
  geometry = 1,
  fading = 2,
  cache = 3,
  requests = 4,
  oracle = 5,
  test = 6,
};

std::uint64_t mix64(std::uint64_t x);

// Derives the seed used for realization `index` of a sweep.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

// Counter-based stream: draw n is a pure function of
// (seed, realization, tag, n), so streams can be created in any order
// on any thread and still produce the same numbers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t realization, StreamTag tag);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer on [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);
  double normal();
  // Circularly-symmetric complex Gaussian with unit variance.
  cplx complex_normal();
  cvec complex_normal_vector(Eigen::Index n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fran
