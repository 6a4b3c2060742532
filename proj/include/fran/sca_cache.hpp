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

#include <iosfwd>
#include <vector>

#include "fran/bounds.hpp"
#include "fran/cvxkit.hpp"
#include "fran/metrics.hpp"
#include "fran/scenario.hpp"

namespace fran {

// Expansion point of the cache-level SCA. Arrays are indexed [user][errh];
// eps[k'][i] bounds the leakage of eRRH i towards user k'.
struct CacheIterate {
  Beamformers g;
  std::vector<std::vector<double>> rate;
  std::vector<std::vector<double>> gamma_bar;
  std::vector<std::vector<double>> chi;
  std::vector<std::vector<double>> eps;
  double objective = 0.0;
};

// Phi(g, chi) = 2 Re(c g_exp^H h h^H g) / chi_exp - (|c h^H g_exp| / chi_exp)^2 chi
TangentBound phi_lower_bound(const cvec& g_exp, double chi_exp, double c, const cvec& h);

// A realified cache-level subproblem plus the variable layout needed to
// move between solver vectors and iterates. Index tables are [user][errh]
// with -1 for pairs that have no variable.
struct CacheSubproblem {
  cvx::ConvexProgram program;
  std::size_t antennas = 0;
  std::vector<std::vector<int>> g_index;  // first of 2 * N_t reals
  std::vector<std::vector<int>> r_index;
  std::vector<std::vector<int>> gamma_index;
  std::vector<std::vector<int>> chi_index;
  std::vector<std::vector<int>> eps_index;

  rvec pack(const CacheIterate& it) const;
  // Overwrites the entries that have variables; others keep their value.
  void unpack(const rvec& x, CacheIterate& it) const;
};

// Centralized subproblem around `iterate` for every eRRH at once.
CacheSubproblem build_subproblem(const Instance& inst, const CacheIterate& iterate);

// Matched filters with equal power split; aux variables set by equality and
// r = min(log2(1 + gamma_bar), S/tau).
CacheIterate initial_cache_iterate(const Instance& inst);

// Algorithm 1. Never throws on solver trouble: the returned solution has
// status failed, the last good iterate, the partial trace, and a message.
CacheLevelSolution solve_cache_central(const Instance& inst,
                                       const cvx::SolverOptions& options = {});

// iter,objective,max_power_residual,wall_ms[,errh_id][,load_0,...]
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace, bool with_errh,
                     std::size_t num_loads = 0);

}  // namespace fran
