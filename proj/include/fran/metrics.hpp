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

#include <optional>
#include <string>
#include <vector>

#include "fran/common.hpp"
#include "fran/scenario.hpp"

namespace fran {

// One row of an SCA convergence trace.
struct TraceEntry {
  std::size_t iteration = 0;
  double objective = 0.0;
  // max_i (transmit power at eRRH i - P); <= 0 when feasible.
  double max_power_residual = 0.0;
  double wall_ms = 0.0;
  // eRRH that ran the loop; -1 for centralized loops.
  int errh = -1;
  // Exact fronthaul load per eRRH (network level only).
  std::vector<double> fronthaul_loads;
};

enum class SolveStatus {
  converged,        // |delta objective| <= eta
  iteration_limit,  // max_iterations reached first
  failed,           // a subproblem could not be solved; last good iterate kept
};

const char* to_string(SolveStatus s);

// Cache-level beamformers and rates. Indexed [user][errh]; entries for
// pairs outside the schedule are zero.
struct CacheLevelSolution {
  std::vector<std::vector<cvec>> g;
  std::vector<std::vector<double>> rate;        // delivered r_c, true-SINR based
  std::vector<std::vector<double>> achievable;  // log2(1 + SINR), uncapped
  std::vector<std::vector<double>> gamma_bar;
  std::vector<std::vector<double>> chi;
  std::vector<std::vector<double>> eps;  // eps[k'][i], leakage caps
  double objective = 0.0;                // sum of rate
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;            // subproblem solves (max over eRRHs if decentralized)
  SolveStatus status = SolveStatus::converged;
  std::vector<SolveStatus> errh_status;  // decentralized only
  std::string message;                   // solver diagnostics when status == failed

  // Zero beamformers and rates sized for the instance.
  static CacheLevelSolution zeros(const Instance& inst);
  // r_bar_c[k] = max_i rate[k][i]
  double max_rate(std::size_t user) const;
};

// Network-level stacked beamformers and per-antenna quantization noise.
struct NetworkLevelSolution {
  std::vector<cvec> u;       // length K_R * N_t each
  std::vector<rvec> omega;   // omega[i][n] > 0, diagonal of Omega_i
  std::vector<double> rate;  // delivered r_n
  std::vector<double> achievable;
  std::vector<double> cap;   // max(S - tau * r_bar_c, 0)
  double objective = 0.0;
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::converged;
  std::string message;
};

// Per-eRRH block B_i u of a stacked vector.
cvec errh_block(const cvec& stacked, std::size_t errh, std::size_t antennas);

using Beamformers = std::vector<std::vector<cvec>>;  // g[k][i]

// Cache-level SINR of user k served by eRRH i; k must be in K_i.
double cache_sinr(const Beamformers& g, const Instance& inst, std::size_t k, std::size_t i);
double cache_sinr(const CacheLevelSolution& sol, const Instance& inst, std::size_t k,
                  std::size_t i);

// Signal to interference-leakage-plus-noise ratio; uses only eRRH i's
// channels. k must be in K_i.
double silnr(const Beamformers& g, const Instance& inst, std::size_t k, std::size_t i);
double silnr(const CacheLevelSolution& sol, const Instance& inst, std::size_t k, std::size_t i);

double network_sinr(const std::vector<cvec>& u, const std::vector<rvec>& omega,
                    const ChannelSet& channels, double noise_power, std::size_t k);
double network_sinr(const NetworkLevelSolution& sol, const Instance& inst, std::size_t k);

// log2 det(A_i) - sum_n log2 omega[i][n] with
// A_i = sum_k (1 - c[f_k][i]) B_i u_k u_k^H B_i^H + Diag(omega[i]).
// Throws DomainError if any omega[i][n] <= 0.
double fronthaul_load(const std::vector<cvec>& u, const std::vector<rvec>& omega,
                      const Instance& inst, std::size_t i);
double fronthaul_load(const NetworkLevelSolution& sol, const Instance& inst, std::size_t i);

// A_i as a dense Hermitian matrix.
cmat fronthaul_covariance(const std::vector<cvec>& u, const rvec& omega_i, const Instance& inst,
                          std::size_t i);

// log2 det of a Hermitian positive definite matrix; throws DomainError
// if the Cholesky factorization fails.
double log2_det(const cmat& a);

struct DeliveryReport {
  double two_level_total = 0.0;  // T_p = tau * sum r_c + sum r_n
  double network_total = 0.0;    // T_T = sum r_n
  double cache_total = 0.0;      // sum r_c (before the tau weight)
  double achievable_total = 0.0; // tau * sum R_c + sum R_n
  std::vector<double> per_user;  // tau * r_c + r_n per user
  std::vector<double> fronthaul_loads;
};

// cache may be null (cloud-only transmission).
DeliveryReport delivery_report(const CacheLevelSolution* cache, const NetworkLevelSolution& net,
                               const Instance& inst);

struct Violation {
  std::string constraint;
  double residual = 0.0;
};

std::vector<Violation> check_feasibility(const CacheLevelSolution& sol, const Instance& inst,
                                         double tol = 1e-6);
std::vector<Violation> check_feasibility(const NetworkLevelSolution& sol, const Instance& inst,
                                         double tol = 1e-6);

std::string format_violations(const std::vector<Violation>& v);

// Per-eRRH transmit power minus P, maximized over eRRHs.
double max_power_residual(const Beamformers& g, const Instance& inst);
double max_power_residual(const std::vector<cvec>& u, const std::vector<rvec>& omega,
                          const Instance& inst);

// Fills rate / achievable from true SINRs: rate = min(log2(1+SINR), S/tau).
void score_cache_rates(CacheLevelSolution& sol, const Instance& inst);
// Fills rate / achievable / objective: rate = min(log2(1+SINR), cap).
void score_network_rates(NetworkLevelSolution& sol, const Instance& inst);

}  // namespace fran
