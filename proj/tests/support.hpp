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

// Fixtures and independent reference evaluations shared by the unit and
// acceptance suites. Nothing in here calls the library routine it checks.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fran/metrics.hpp"
#include "fran/scenario.hpp"

namespace fran::testing {

using Channels = std::vector<std::vector<cvec>>;  // [user][errh]

inline cvec vec(std::initializer_list<cplx> v) {
  cvec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index n = 0;
  for (const cplx& x : v) out[n++] = x;
  return out;
}

// Instance with explicit channels. cached[f] is the eRRH holding file f
// (-1 for none); requests[k] is the file of user k.
inline Instance build_instance(ScenarioParams p, const Channels& h, const std::vector<int>& cached,
                               const std::vector<std::size_t>& requests) {
  p.num_users = h.size();
  p.num_errh = h.empty() ? p.num_errh : h[0].size();
  if (!h.empty() && !h[0].empty()) p.antennas = static_cast<std::size_t>(h[0][0].size());
  p.library_size = cached.size();
  ChannelSet ch;
  ch.errh_positions.assign(p.num_errh, Point{});
  ch.user_positions.assign(p.num_users, Point{});
  ch.h = h;
  ch.gain.assign(p.num_users, std::vector<double>(p.num_errh, 1.0));
  CacheState cache;
  cache.c.assign(cached.size(), std::vector<std::uint8_t>(p.num_errh, 0));
  for (std::size_t f = 0; f < cached.size(); ++f) {
    if (cached[f] >= 0) cache.c[f][static_cast<std::size_t>(cached[f])] = 1;
  }
  RequestProfile req;
  req.file = requests;
  return assemble_instance(p, std::move(ch), std::move(cache), std::move(req));
}

inline double abs2_inner(const cvec& h, const cvec& g) {
  cplx acc = 0.0;
  for (Eigen::Index n = 0; n < h.size(); ++n) acc += std::conj(h[n]) * g[n];
  return std::norm(acc);
}

inline bool served(const Instance& inst, std::size_t k, std::size_t i) {
  for (std::size_t x : inst.schedule.served[i]) {
    if (x == k) return true;
  }
  return false;
}

// Cache-level SINR written out term by term.
inline double sinr_reference(const Beamformers& g, const Instance& inst, std::size_t k,
                             std::size_t i) {
  const auto& h = inst.channels.h;
  double intra = 0.0;
  double inter = 0.0;
  for (std::size_t j = 0; j < inst.num_errh(); ++j) {
    for (std::size_t kp = 0; kp < inst.num_users(); ++kp) {
      if (!served(inst, kp, j) || (kp == k && j == i)) continue;
      const double v = abs2_inner(h[k][j], g[kp][j]);
      if (j == i) {
        intra += v;
      } else {
        inter += v;
      }
    }
  }
  return abs2_inner(h[k][i], g[k][i]) / (intra + inter + inst.params.noise_power);
}

inline double silnr_reference(const Beamformers& g, const Instance& inst, std::size_t k,
                              std::size_t i) {
  const auto& h = inst.channels.h;
  double intra = 0.0;
  for (std::size_t kp : inst.schedule.served[i]) {
    if (kp != k) intra += abs2_inner(h[k][i], g[kp][i]);
  }
  double leak = 0.0;
  for (std::size_t kl : inst.schedule.leakage[i]) {
    for (std::size_t kp : inst.schedule.served[i]) leak += abs2_inner(h[kl][i], g[kp][i]);
  }
  return abs2_inner(h[k][i], g[k][i]) / (intra + leak + inst.params.noise_power);
}

inline double network_sinr_reference(const std::vector<cvec>& u, const std::vector<rvec>& omega,
                                     const Instance& inst, std::size_t k) {
  const std::size_t nt = inst.params.antennas;
  cvec hk(static_cast<Eigen::Index>(inst.num_errh() * nt));
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    for (std::size_t n = 0; n < nt; ++n) {
      hk[static_cast<Eigen::Index>(i * nt + n)] = inst.channels.h[k][i][static_cast<Eigen::Index>(n)];
    }
  }
  double interference = inst.params.noise_power;
  for (std::size_t kp = 0; kp < u.size(); ++kp) {
    if (kp != k) interference += abs2_inner(hk, u[kp]);
  }
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    for (std::size_t n = 0; n < nt; ++n) {
      interference += std::norm(hk[static_cast<Eigen::Index>(i * nt + n)]) *
                      omega[i][static_cast<Eigen::Index>(n)];
    }
  }
  return abs2_inner(hk, u[k]) / interference;
}

// log2 det from the eigenvalues of a Hermitian matrix.
inline double log2_det_eig(const cmat& a) {
  Eigen::SelfAdjointEigenSolver<cmat> es(a, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index n = 0; n < es.eigenvalues().size(); ++n) s += std::log2(es.eigenvalues()[n]);
  return s;
}

inline double fronthaul_load_reference(const std::vector<cvec>& u, const rvec& omega,
                                       const Instance& inst, std::size_t i) {
  const auto nt = static_cast<Eigen::Index>(inst.params.antennas);
  cmat a = cmat::Zero(nt, nt);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (inst.cache.c[inst.requests.file[k]][i]) continue;
    const cvec b = u[k].segment(static_cast<Eigen::Index>(i) * nt, nt);
    for (Eigen::Index r = 0; r < nt; ++r) {
      for (Eigen::Index c = 0; c < nt; ++c) a(r, c) += b[r] * std::conj(b[c]);
    }
  }
  double logs = 0.0;
  for (Eigen::Index n = 0; n < nt; ++n) {
    a(n, n) += omega[n];
    logs += std::log2(omega[n]);
  }
  return log2_det_eig(a) - logs;
}

inline bool nondecreasing(const std::vector<TraceEntry>& trace, double slack, int errh = -2) {
  double prev = -INFINITY;
  for (const auto& e : trace) {
    if (errh != -2 && e.errh != errh) continue;
    if (e.objective < prev - slack) return false;
    prev = e.objective;
  }
  return true;
}

// Every per-loop trace (decentralized traces are split by eRRH).
inline bool all_traces_nondecreasing(const std::vector<TraceEntry>& trace, double slack) {
  std::vector<int> tags;
  for (const auto& e : trace) {
    bool seen = false;
    for (int t : tags) seen = seen || t == e.errh;
    if (!seen) tags.push_back(e.errh);
  }
  for (int t : tags) {
    if (!nondecreasing(trace, slack, t)) return false;
  }
  return true;
}

}  // namespace fran::testing
