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

#include "fran/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <thread>

#include "fran/rng.hpp"
#include "fran/sca_cache.hpp"
#include "fran/sca_network.hpp"

namespace fran {

namespace {

struct ServedUser {
  std::size_t user;
  std::size_t errh;
};

std::vector<ServedUser> served_users(const Instance& inst) {
  std::vector<ServedUser> out;
  for (std::size_t k = 0; k < inst.num_users(); ++k) {
    if (const auto i = inst.schedule.serving_errh(k)) out.push_back({k, *i});
  }
  return out;
}

void check_tiny(const Instance& inst) {
  if (inst.num_errh() > 2 || inst.params.antennas > 2 || inst.num_users() > 2) {
    throw InvalidParams("brute force needs <= 2 eRRHs, <= 2 antennas and <= 2 users");
  }
}

void check_grid(const GridSpec& grid) {
  if (grid.magnitude_levels < 1 || grid.phase_levels < 1) {
    throw InvalidParams("grid needs at least one magnitude and one phase level");
  }
}

double choices_per_beamformer(std::size_t antennas, const GridSpec& grid) {
  const double l = static_cast<double>(grid.magnitude_levels);
  const double q = static_cast<double>(grid.phase_levels);
  return (l + 1.0) * std::pow(1.0 + l * q, static_cast<double>(antennas) - 1.0);
}

// All grid beamformers of length n, in a fixed order.
std::vector<cvec> beamformer_grid(std::size_t n, double max_power, const GridSpec& grid) {
  const std::size_t l = grid.magnitude_levels;
  const std::size_t q = grid.phase_levels;
  const double amp = std::sqrt(max_power);
  // Choices for one coefficient after the first: zero, then magnitude x phase.
  std::vector<cplx> tail{cplx(0.0, 0.0)};
  for (std::size_t a = 1; a <= l; ++a) {
    for (std::size_t b = 0; b < q; ++b) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(b) / static_cast<double>(q);
      tail.push_back(std::polar(amp * static_cast<double>(a) / static_cast<double>(l), phase));
    }
  }
  std::vector<cvec> out;
  std::vector<std::size_t> digit(n, 0);
  while (true) {
    cvec g(static_cast<Eigen::Index>(n));
    g[0] = cplx(amp * static_cast<double>(digit[0]) / static_cast<double>(l), 0.0);
    for (std::size_t j = 1; j < n; ++j) g[static_cast<Eigen::Index>(j)] = tail[digit[j]];
    out.push_back(std::move(g));
    std::size_t j = n;
    while (j > 0) {
      --j;
      const std::size_t radix = j == 0 ? l + 1 : tail.size();
      if (++digit[j] < radix) break;
      digit[j] = 0;
      if (j == 0) return out;
    }
  }
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;
};

}  // namespace

double grid_points(const Instance& inst, const GridSpec& grid) {
  check_grid(grid);
  const double per = choices_per_beamformer(inst.params.antennas, grid);
  return std::pow(per, static_cast<double>(served_users(inst).size()));
}

BruteForceResult brute_force_cache(const Instance& inst, const GridSpec& grid) {
  check_tiny(inst);
  const double total = grid_points(inst, grid);
  if (total > GridSpec::kMaxPoints) throw InvalidParams("grid exceeds the 1e7 point guard");

  const auto& p = inst.params;
  const auto users = served_users(inst);
  const std::size_t ns = users.size();
  BruteForceResult out;
  const cvec zero = cvec::Zero(static_cast<Eigen::Index>(p.antennas));
  out.g.assign(inst.num_users(), std::vector<cvec>(inst.num_errh(), zero));
  if (ns == 0) {
    out.points = 1.0;
    return out;
  }

  const std::vector<cvec> cand = beamformer_grid(p.antennas, p.max_power, grid);
  const std::size_t nc = cand.size();
  // gain[s][t][b] = |h_{user t, errh of s}^H g_b|^2, power[b] = |g_b|^2.
  std::vector<std::vector<std::vector<double>>> gain(
      ns, std::vector<std::vector<double>>(ns, std::vector<double>(nc)));
  std::vector<double> power(nc);
  for (std::size_t b = 0; b < nc; ++b) power[b] = cand[b].squaredNorm();
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < ns; ++t) {
      const cvec& h = inst.channels.h[users[t].user][users[s].errh];
      for (std::size_t b = 0; b < nc; ++b) gain[s][t][b] = std::norm(h.dot(cand[b]));
    }
  }
  const double cap = p.delay > 0.0 ? p.file_size / p.delay : std::numeric_limits<double>::infinity();

  std::size_t combos = 1;
  for (std::size_t s = 0; s < ns; ++s) combos *= nc;

  auto evaluate = [&](std::size_t index, double& value) {
    std::size_t pick[2] = {0, 0};
    for (std::size_t s = 0; s < ns; ++s) {
      pick[s] = index % nc;
      index /= nc;
    }
    double errh_power[2] = {0.0, 0.0};
    for (std::size_t s = 0; s < ns; ++s) errh_power[users[s].errh] += power[pick[s]];
    double scale[2] = {1.0, 1.0};
    for (std::size_t i = 0; i < inst.num_errh(); ++i) {
      if (errh_power[i] > p.max_power * (1.0 + 1e-12)) {
        if (!grid.project) return false;
        scale[i] = p.max_power / errh_power[i];
      }
    }
    value = 0.0;
    for (std::size_t t = 0; t < ns; ++t) {
      double interference = p.noise_power;
      for (std::size_t s = 0; s < ns; ++s) {
        if (s != t) interference += scale[users[s].errh] * gain[s][t][pick[s]];
      }
      const double signal = scale[users[t].errh] * gain[t][t][pick[t]];
      value += std::min(std::log2(1.0 + signal / interference), cap);
    }
    return true;
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 16));
  const std::size_t chunk = (combos + workers - 1) / workers;
  std::vector<std::future<Best>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(combos, lo + chunk);
    if (lo >= hi) break;
    jobs.push_back(std::async(std::launch::async, [&, lo, hi] {
      Best best;
      double v = 0.0;
      for (std::size_t idx = lo; idx < hi; ++idx) {
        if (evaluate(idx, v) && v > best.value) best = {v, idx};
      }
      return best;
    }));
  }
  Best best;
  for (auto& j : jobs) {
    const Best b = j.get();
    if (b.value > best.value || (b.value == best.value && b.index < best.index)) best = b;
  }
  out.points = static_cast<double>(combos);
  if (!std::isfinite(best.value)) return out;

  out.objective = best.value;
  std::size_t index = best.index;
  double errh_power[2] = {0.0, 0.0};
  std::size_t pick[2] = {0, 0};
  for (std::size_t s = 0; s < ns; ++s) {
    pick[s] = index % nc;
    index /= nc;
    errh_power[users[s].errh] += power[pick[s]];
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const double e = errh_power[users[s].errh];
    const double scale = e > p.max_power * (1.0 + 1e-12) ? std::sqrt(p.max_power / e) : 1.0;
    out.g[users[s].user][users[s].errh] = scale * cand[pick[s]];
  }
  return out;
}

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::phi: return "phi";
    case BoundKind::psi: return "psi";
    case BoundKind::logdet: return "logdet";
  }
  return "?";
}

namespace {

double log_uniform(RngStream& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

cvec random_vector(RngStream& rng, Eigen::Index n, double power) {
  return rng.complex_normal_vector(n) * std::sqrt(power / static_cast<double>(n));
}

// Diag(omega) + a few random rank-one terms, the shape of a fronthaul
// covariance.
cmat random_covariance(RngStream& rng, Eigen::Index n, double max_power) {
  cmat a = cmat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) a(j, j) = log_uniform(rng, 1e-3, 1.0) * max_power / n;
  const int terms = 1 + static_cast<int>(rng.below(3));
  for (int t = 0; t < terms; ++t) {
    const cvec u = random_vector(rng, n, log_uniform(rng, 1e-3, 1.0) * max_power);
    a.noalias() += u * u.adjoint();
  }
  return 0.5 * (a + a.adjoint());
}

}  // namespace

BoundGapReport sample_bound_gaps(BoundKind bound, const Instance& inst, std::size_t n_samples,
                                 std::uint64_t seed) {
  if (n_samples < 1) throw InvalidParams("need at least one sample");
  RngStream rng(seed, static_cast<std::uint64_t>(bound), StreamTag::oracle);
  const auto& p = inst.params;
  const auto nt = static_cast<Eigen::Index>(p.antennas);
  const auto ntt = static_cast<Eigen::Index>(p.total_antennas());
  const std::size_t per_expansion = 100;

  BoundGapReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  std::size_t done = 0;
  while (done < n_samples) {
    const std::size_t k = inst.num_users() > 0 ? rng.below(inst.num_users()) : 0;
    const std::size_t i = rng.below(inst.num_errh());
    const std::size_t batch = std::min(per_expansion, n_samples - done);
    if (bound == BoundKind::logdet) {
      const cmat b = random_covariance(rng, nt, p.max_power);
      for (std::size_t s = 0; s < batch; ++s) {
        const cmat a = s == 0 ? b : random_covariance(rng, nt, p.max_power);
        const double gap = phi_logdet_upper(a, b) - log2_det(a);
        if (s == 0) rep.tangency_gap = std::max(rep.tangency_gap, std::abs(gap));
        rep.min_gap = std::min(rep.min_gap, gap);
      }
    } else {
      const bool cache = bound == BoundKind::phi;
      cvec h;
      if (inst.num_users() == 0) {
        h = rng.complex_normal_vector(cache ? nt : ntt);
      } else {
        h = cache ? inst.channels.h[k][i] : inst.channels.stacked(k);
      }
      const Eigen::Index n = h.size();
      const cvec v_exp = random_vector(rng, n, log_uniform(rng, 1e-2, 1.0) * p.max_power);
      const double s_exp = log_uniform(rng, 1e-2, 1e1) * p.noise_power;
      const TangentBound tb = cache ? phi_lower_bound(v_exp, s_exp, 1.0, h)
                                    : psi_lower_bound(v_exp, s_exp, h);
      for (std::size_t s = 0; s < batch; ++s) {
        cvec v = v_exp;
        double sv = s_exp;
        if (s > 0) {
          v = random_vector(rng, n, log_uniform(rng, 1e-3, 1.0) * p.max_power);
          sv = log_uniform(rng, 1e-2, 1e2) * p.noise_power;
        }
        const double truth = std::norm(h.dot(v)) / sv;
        const double gap = truth - tb(v, sv);
        if (s == 0) rep.tangency_gap = std::max(rep.tangency_gap, std::abs(gap));
        rep.min_gap = std::min(rep.min_gap, gap);
      }
    }
    done += batch;
  }
  rep.samples = done;
  return rep;
}

double closed_form_single_user(const cvec& h, double max_power, double noise_power,
                               double file_size, double delay) {
  if (!(h.norm() > 0.0)) throw DomainError("channel must be nonzero");
  if (!(delay > 0.0)) throw DomainError("delay must be positive");
  return std::min(std::log2(1.0 + max_power * h.squaredNorm() / noise_power), file_size / delay);
}

}  // namespace fran
