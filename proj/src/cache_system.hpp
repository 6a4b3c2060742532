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

#include <functional>
#include <string>
#include <vector>

#include "fran/sca_cache.hpp"

namespace fran::detail {

// What one cache-level SCA loop sees. The centralized loop covers every
// eRRH; a decentralized loop covers one eRRH and only its own channels.
struct CacheSystem {
  std::size_t num_users = 0;
  std::size_t num_errh = 0;
  std::size_t antennas = 0;
  double max_power = 0.0;
  double noise = 0.0;
  double file_size = 0.0;
  double delay = 0.0;
  std::vector<std::size_t> errhs;                   // eRRHs that own variables
  std::vector<std::vector<std::size_t>> served;     // [errh]
  std::vector<std::vector<std::size_t>> eps_users;  // [errh], users k' with eps[k'][i]
  // true:  noise of every user of eRRH i is sum_{k' in eps_users[i]} eps[k'][i] + sigma^2
  // false: noise of user k at eRRH i is sum_{j != i} eps[k][j] + sigma^2
  bool local_noise = false;
  std::function<const cvec&(std::size_t k, std::size_t i)> channel;
};

CacheIterate empty_iterate(const CacheSystem& sys);
CacheIterate initial_iterate(const CacheSystem& sys);
CacheSubproblem build_program(const CacheSystem& sys, const CacheIterate& it);

struct ScaRun {
  CacheIterate iterate;
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::converged;
  std::string message;
};

ScaRun run_sca(const CacheSystem& sys, double eta, std::size_t max_iterations, int errh_tag,
               const cvx::SolverOptions& options);

}  // namespace fran::detail
