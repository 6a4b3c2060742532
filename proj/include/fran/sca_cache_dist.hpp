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

#include <vector>

#include "fran/sca_cache.hpp"

namespace fran {

// Everything eRRH i may use: its own channels to every user, its own user
// sets, and the scalar parameters. Channels of other eRRHs are not copied.
struct LocalInstance {
  std::size_t errh = 0;
  std::size_t num_users = 0;
  ScenarioParams params;
  std::vector<cvec> h;                // h[k] = h_{k,errh}
  std::vector<std::size_t> served;    // K_i
  std::vector<std::size_t> leakage;   // K~_i

  static LocalInstance from(const Instance& inst, std::size_t errh);
};

// Subproblem of the SILNR surrogate. The iterate uses the global [user][errh]
// layout; only column `local.errh` is read or written.
CacheSubproblem build_local_subproblem(const LocalInstance& local, const CacheIterate& iterate);

// Initial local iterate (column `local.errh` filled).
CacheIterate initial_local_iterate(const LocalInstance& local, std::size_t num_errh);

// K_R independent SCA loops run concurrently, then scored with the true SINR.
CacheLevelSolution solve_cache_decentral(const Instance& inst,
                                         const cvx::SolverOptions& options = {});

}  // namespace fran
