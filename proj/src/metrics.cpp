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

#include "fran/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fran {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_limit: return "iteration-limit";
    case SolveStatus::failed: return "failed";
  }
  return "unknown";
}

CacheLevelSolution CacheLevelSolution::zeros(const Instance& inst) {
  const std::size_t nu = inst.num_users();
  const std::size_t nr = inst.num_errh();
  const auto nt = static_cast<Eigen::Index>(inst.params.antennas);
  CacheLevelSolution s;
  s.g.assign(nu, std::vector<cvec>(nr, cvec::Zero(nt)));
  s.rate.assign(nu, std::vector<double>(nr, 0.0));
  s.achievable = s.rate;
  s.gamma_bar = s.rate;
  s.chi = s.rate;
  s.eps = s.rate;
  return s;
}

double CacheLevelSolution::max_rate(std::size_t user) const {
  if (user >= rate.size() || rate[user].empty()) return 0.0;
  return *std::max_element(rate[user].begin(), rate[user].end());
}

cvec errh_block(const cvec& stacked, std::size_t errh, std::size_t antennas) {
  return stacked.segment(static_cast<Eigen::Index>(errh * antennas),
                         static_cast<Eigen::Index>(antennas));
}

namespace {

void require_served(const Instance& inst, std::size_t k, std::size_t i) {
  if (i >= inst.num_errh() || k >= inst.num_users() || !inst.schedule.is_served(k, i)) {
    throw DomainError("user " + std::to_string(k) + " is not scheduled at eRRH " +
                      std::to_string(i));
  }
}

double intra_interference(const Beamformers& g, const Instance& inst, std::size_t k,
                          std::size_t i) {
  double sum = 0.0;
  for (std::size_t kp : inst.schedule.served[i]) {
    if (kp == k) continue;
    sum += std::norm(inst.channels.h[k][i].dot(g[kp][i]));
  }
  return sum;
}

double desired_power(const Beamformers& g, const Instance& inst, std::size_t k, std::size_t i) {
  return std::norm(inst.channels.h[k][i].dot(g[k][i]));
}

double capped_rate(double sinr, double cap) {
  const double r = std::log2(1.0 + std::max(sinr, 0.0));
  return std::min(r, cap);
}

}  // namespace

double cache_sinr(const Beamformers& g, const Instance& inst, std::size_t k, std::size_t i) {
  require_served(inst, k, i);
  double denom = intra_interference(g, inst, k, i) + inst.params.noise_power;
  for (std::size_t j = 0; j < inst.num_errh(); ++j) {
    if (j == i) continue;
    for (std::size_t kp : inst.schedule.served[j]) {
      denom += std::norm(inst.channels.h[k][j].dot(g[kp][j]));
    }
  }
  return desired_power(g, inst, k, i) / denom;
}

double cache_sinr(const CacheLevelSolution& sol, const Instance& inst, std::size_t k,
                  std::size_t i) {
  return cache_sinr(sol.g, inst, k, i);
}

double silnr(const Beamformers& g, const Instance& inst, std::size_t k, std::size_t i) {
  require_served(inst, k, i);
  double denom = intra_interference(g, inst, k, i) + inst.params.noise_power;
  for (std::size_t victim : inst.schedule.leakage[i]) {
    for (std::size_t kp : inst.schedule.served[i]) {
      denom += std::norm(inst.channels.h[victim][i].dot(g[kp][i]));
    }
  }
  return desired_power(g, inst, k, i) / denom;
}

double silnr(const CacheLevelSolution& sol, const Instance& inst, std::size_t k, std::size_t i) {
  return silnr(sol.g, inst, k, i);
}

double network_sinr(const std::vector<cvec>& u, const std::vector<rvec>& omega,
                    const ChannelSet& channels, double noise_power, std::size_t k) {
  const cvec hk = channels.stacked(k);
  double denom = noise_power;
  for (std::size_t kp = 0; kp < u.size(); ++kp) {
    if (kp == k) continue;
    denom += std::norm(hk.dot(u[kp]));
  }
  const std::size_t nr = channels.num_errh();
  for (std::size_t i = 0; i < nr && i < omega.size(); ++i) {
    denom += channels.h[k][i].cwiseAbs2().dot(omega[i]);
  }
  return std::norm(hk.dot(u[k])) / denom;
}

double network_sinr(const NetworkLevelSolution& sol, const Instance& inst, std::size_t k) {
  return network_sinr(sol.u, sol.omega, inst.channels, inst.params.noise_power, k);
}

cmat fronthaul_covariance(const std::vector<cvec>& u, const rvec& omega_i, const Instance& inst,
                          std::size_t i) {
  const std::size_t nt = inst.params.antennas;
  cmat a = omega_i.cast<cplx>().asDiagonal();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (inst.user_cached_at(k, i)) continue;
    const cvec b = errh_block(u[k], i, nt);
    a += b * b.adjoint();
  }
  return a;
}

double log2_det(const cmat& a) {
  Eigen::LLT<cmat> llt(a);
  if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive definite");
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index j = 0; j < l.rows(); ++j) s += std::log2(l(j, j).real());
  return 2.0 * s;
}

double fronthaul_load(const std::vector<cvec>& u, const std::vector<rvec>& omega,
                      const Instance& inst, std::size_t i) {
  const rvec& w = omega.at(i);
  if ((w.array() <= 0.0).any()) {
    throw DomainError("quantization noise variance must be positive at eRRH " + std::to_string(i));
  }
  const double logdet = log2_det(fronthaul_covariance(u, w, inst, i));
  return logdet - w.array().log().sum() / kLn2;
}

double fronthaul_load(const NetworkLevelSolution& sol, const Instance& inst, std::size_t i) {
  return fronthaul_load(sol.u, sol.omega, inst, i);
}

double max_power_residual(const Beamformers& g, const Instance& inst) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    double p = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (inst.user_cached_at(k, i)) p += g[k][i].squaredNorm();
    }
    worst = std::max(worst, p - inst.params.max_power);
  }
  return worst;
}

double max_power_residual(const std::vector<cvec>& u, const std::vector<rvec>& omega,
                          const Instance& inst) {
  const std::size_t nt = inst.params.antennas;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    double p = omega.at(i).sum();
    for (const auto& uk : u) p += errh_block(uk, i, nt).squaredNorm();
    worst = std::max(worst, p - inst.params.max_power);
  }
  return worst;
}

void score_cache_rates(CacheLevelSolution& sol, const Instance& inst) {
  const double tau = inst.params.delay;
  const double cap =
      tau > 0.0 ? inst.params.file_size / tau : std::numeric_limits<double>::infinity();
  sol.objective = 0.0;
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    for (std::size_t k : inst.schedule.served[i]) {
      const double sinr = cache_sinr(sol.g, inst, k, i);
      sol.achievable[k][i] = std::log2(1.0 + sinr);
      sol.rate[k][i] = capped_rate(sinr, cap);
      sol.objective += sol.rate[k][i];
    }
  }
}

void score_network_rates(NetworkLevelSolution& sol, const Instance& inst) {
  const std::size_t nu = inst.num_users();
  sol.rate.assign(nu, 0.0);
  sol.achievable.assign(nu, 0.0);
  sol.objective = 0.0;
  for (std::size_t k = 0; k < nu; ++k) {
    const double sinr = network_sinr(sol, inst, k);
    sol.achievable[k] = std::log2(1.0 + sinr);
    sol.rate[k] = std::max(0.0, capped_rate(sinr, sol.cap.at(k)));
    sol.objective += sol.rate[k];
  }
}

DeliveryReport delivery_report(const CacheLevelSolution* cache, const NetworkLevelSolution& net,
                               const Instance& inst) {
  const double tau = cache ? inst.params.delay : 0.0;
  const std::size_t nu = inst.num_users();
  DeliveryReport rep;
  rep.per_user.assign(nu, 0.0);
  for (std::size_t k = 0; k < nu; ++k) {
    const double rn = k < net.rate.size() ? net.rate[k] : 0.0;
    const double an = k < net.achievable.size() ? net.achievable[k] : 0.0;
    rep.network_total += rn;
    rep.per_user[k] += rn;
    rep.achievable_total += an;
  }
  if (cache) {
    for (std::size_t i = 0; i < inst.num_errh(); ++i) {
      for (std::size_t k : inst.schedule.served[i]) {
        rep.cache_total += cache->rate[k][i];
        rep.per_user[k] += tau * cache->rate[k][i];
        rep.achievable_total += tau * cache->achievable[k][i];
      }
    }
  }
  rep.two_level_total = tau * rep.cache_total + rep.network_total;
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    rep.fronthaul_loads.push_back(net.omega.size() == inst.num_errh()
                                      ? fronthaul_load(net, inst, i)
                                      : std::numeric_limits<double>::quiet_NaN());
  }
  return rep;
}

namespace {

void flag(std::vector<Violation>& out, std::string name, double residual, double tol) {
  if (!(residual <= tol)) out.push_back({std::move(name), residual});
}

std::string pair_name(const char* what, std::size_t k, std::size_t i) {
  return std::string(what) + "[k=" + std::to_string(k) + ",i=" + std::to_string(i) + "]";
}

}  // namespace

std::vector<Violation> check_feasibility(const CacheLevelSolution& sol, const Instance& inst,
                                         double tol) {
  std::vector<Violation> out;
  const auto& p = inst.params;
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    double power = 0.0;
    for (std::size_t k = 0; k < inst.num_users(); ++k) {
      if (inst.schedule.is_served(k, i)) {
        power += sol.g[k][i].squaredNorm();
        const double r = sol.rate[k][i];
        flag(out, pair_name("rate_nonnegative", k, i), -r, tol);
        flag(out, pair_name("file_size", k, i), p.delay * r - p.file_size, tol);
        flag(out, pair_name("achievable_rate", k, i),
             r - std::log2(1.0 + cache_sinr(sol.g, inst, k, i)), tol);
      } else {
        flag(out, pair_name("unscheduled_beamformer", k, i), sol.g[k][i].norm(), tol);
      }
    }
    flag(out, "power[i=" + std::to_string(i) + "]", power - p.max_power, tol);
  }
  return out;
}

std::vector<Violation> check_feasibility(const NetworkLevelSolution& sol, const Instance& inst,
                                         double tol) {
  std::vector<Violation> out;
  const auto& p = inst.params;
  const std::size_t nt = p.antennas;
  bool omega_ok = true;
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    const std::string tag = "[i=" + std::to_string(i) + "]";
    double power = sol.omega[i].sum();
    for (const auto& uk : sol.u) power += errh_block(uk, i, nt).squaredNorm();
    flag(out, "power" + tag, power - p.max_power, tol);
    const double min_omega = sol.omega[i].minCoeff();
    if (min_omega <= 0.0) {
      omega_ok = false;
      out.push_back({"quantization_noise_positive" + tag, -min_omega});
    }
  }
  if (omega_ok) {
    for (std::size_t i = 0; i < inst.num_errh(); ++i) {
      flag(out, "fronthaul[i=" + std::to_string(i) + "]",
           fronthaul_load(sol, inst, i) - p.fronthaul_capacity, tol);
    }
  }
  for (std::size_t k = 0; k < inst.num_users(); ++k) {
    const std::string tag = "[k=" + std::to_string(k) + "]";
    const double r = sol.rate[k];
    flag(out, "rate_nonnegative" + tag, -r, tol);
    flag(out, "remaining_file" + tag, r - sol.cap[k], tol);
    flag(out, "achievable_rate" + tag, r - std::log2(1.0 + network_sinr(sol, inst, k)), tol);
  }
  return out;
}

std::string format_violations(const std::vector<Violation>& v) {
  std::ostringstream os;
  os.precision(6);
  for (const auto& x : v) os << x.constraint << " residual=" << x.residual << '\n';
  return os.str();
}

}  // namespace fran
