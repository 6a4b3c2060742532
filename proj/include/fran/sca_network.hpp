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

#include "fran/bounds.hpp"
#include "fran/cvxkit.hpp"
#include "fran/metrics.hpp"
#include "fran/scenario.hpp"

namespace fran {

// Expansion point of the network-level SCA.
struct NetworkIterate {
  std::vector<cvec> u;       // stacked, length K_R * N_t
  std::vector<rvec> omega;   // [errh], length N_t, > 0
  std::vector<double> mu;
  std::vector<double> iota;
  std::vector<double> rate;
  std::vector<double> cap;   // remaining file size per user
  double objective = 0.0;
};

// psi(u, mu) = 2 Re(u_exp^H h h^H u) / mu_exp - (|h^H u_exp| / mu_exp)^2 mu
TangentBound psi_lower_bound(const cvec& u_exp, double mu_exp, const cvec& h);

// log2 det(B) + tr(B^-1 (A - B)) / ln 2 >= log2 det(A)
double phi_logdet_upper(const cmat& a, const cmat& b);

// Realified network-level subproblem. u_index[k][i] is the first of the
// 2 * N_t reals of block u_{k,i} ([Re; Im]) or -1 when the block is fixed
// to zero (inactive user, or uncached file with zero fronthaul capacity).
struct NetworkSubproblem {
  cvx::ConvexProgram program;
  std::size_t antennas = 0;
  std::vector<std::vector<int>> u_index;
  std::vector<int> r_index;
  std::vector<int> iota_index;
  std::vector<int> mu_index;
  std::vector<int> omega_index;  // [errh], first of N_t reals
  std::vector<bool> fronthaul_row;  // [errh], fronthaul constraint present

  rvec pack(const NetworkIterate& it) const;
  void unpack(const rvec& x, NetworkIterate& it) const;
};

// max(S - tau * max_i r_c[k][i], 0); S for every user when cache is null.
std::vector<double> remaining_caps(const Instance& inst, const CacheLevelSolution* cache);

// Scaled matched filters with a strictly feasible fronthaul and power start.
NetworkIterate initial_network_iterate(const Instance& inst, const std::vector<double>& cap);

NetworkSubproblem build_subproblem(const Instance& inst, const NetworkIterate& iterate);

// Algorithm 2. With cache == nullptr the remaining file size is S for every
// user (cloud-only joint transmission). Solver trouble is reported through
// status failed plus the partial trace.
NetworkLevelSolution solve_network(const Instance& inst, const CacheLevelSolution* cache,
                                   const cvx::SolverOptions& options = {});

}  // namespace fran
