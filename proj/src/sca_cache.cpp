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

#include "fran/sca_cache.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "cache_system.hpp"

namespace fran {

TangentBound phi_lower_bound(const cvec& g_exp, double chi_exp, double c, const cvec& h) {
  return tangent_bound(g_exp, chi_exp, h, c);
}

rvec CacheSubproblem::pack(const CacheIterate& it) const {
  rvec x = rvec::Zero(program.num_variables());
  for (std::size_t k = 0; k < g_index.size(); ++k) {
    for (std::size_t i = 0; i < g_index[k].size(); ++i) {
      if (g_index[k][i] >= 0) {
        write_complex(x, g_index[k][i], it.g[k][i]);
        x[r_index[k][i]] = it.rate[k][i];
        x[gamma_index[k][i]] = it.gamma_bar[k][i];
        x[chi_index[k][i]] = it.chi[k][i];
      }
      if (eps_index[k][i] >= 0) x[eps_index[k][i]] = it.eps[k][i];
    }
  }
  return x;
}

void CacheSubproblem::unpack(const rvec& x, CacheIterate& it) const {
  const auto nt = static_cast<Eigen::Index>(antennas);
  for (std::size_t k = 0; k < g_index.size(); ++k) {
    for (std::size_t i = 0; i < g_index[k].size(); ++i) {
      if (g_index[k][i] >= 0) {
        it.g[k][i] = read_complex(x, g_index[k][i], nt);
        it.rate[k][i] = x[r_index[k][i]];
        it.gamma_bar[k][i] = x[gamma_index[k][i]];
        it.chi[k][i] = x[chi_index[k][i]];
      }
      if (eps_index[k][i] >= 0) it.eps[k][i] = x[eps_index[k][i]];
    }
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace, bool with_errh,
                     std::size_t num_loads) {
  out << "iter,objective,max_power_residual,wall_ms";
  if (with_errh) out << ",errh_id";
  for (std::size_t i = 0; i < num_loads; ++i) out << ",load_" << i;
  out << '\n';
  const auto old = out.precision(12);
  for (const auto& e : trace) {
    out << e.iteration << ',' << e.objective << ',' << e.max_power_residual << ',' << e.wall_ms;
    if (with_errh) out << ',' << e.errh;
    for (std::size_t i = 0; i < num_loads; ++i) {
      out << ',';
      if (i < e.fronthaul_loads.size()) out << e.fronthaul_loads[i];
    }
    out << '\n';
  }
  out.precision(old);
}

namespace detail {

namespace {

using cvx::AffineForm;
using cvx::Atom;

double leakage(const CacheSystem& sys, const Beamformers& g, std::size_t victim, std::size_t i) {
  double s = 0.0;
  for (std::size_t k : sys.served[i]) s += std::norm(sys.channel(victim, i).dot(g[k][i]));
  return s;
}

double intra(const CacheSystem& sys, const Beamformers& g, std::size_t k, std::size_t i) {
  double s = 0.0;
  for (std::size_t kp : sys.served[i]) {
    if (kp != k) s += std::norm(sys.channel(k, i).dot(g[kp][i]));
  }
  return s;
}

// eps entries (user, errh) that add to the noise of user k at eRRH i.
std::vector<std::pair<std::size_t, std::size_t>> noise_terms(const CacheSystem& sys,
                                                              std::size_t k, std::size_t i) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (sys.local_noise) {
    for (std::size_t kp : sys.eps_users[i]) out.emplace_back(kp, i);
  } else {
    for (std::size_t j = 0; j < sys.num_errh; ++j) {
      if (j == i) continue;
      const auto& e = sys.eps_users[j];
      if (std::find(e.begin(), e.end(), k) != e.end()) out.emplace_back(k, j);
    }
  }
  return out;
}

double noise_value(const CacheSystem& sys, const CacheIterate& it, std::size_t k, std::size_t i) {
  double s = sys.noise;
  for (const auto& [u, j] : noise_terms(sys, k, i)) s += it.eps[u][j];
  return s;
}

double eps_cap(const CacheSystem& sys, std::size_t victim, std::size_t i) {
  return 2.0 * sys.max_power * sys.channel(victim, i).squaredNorm() + sys.noise;
}

double chi_cap(const CacheSystem& sys, std::size_t k, std::size_t i) {
  double s = sys.max_power * sys.channel(k, i).squaredNorm() + sys.noise;
  for (const auto& [u, j] : noise_terms(sys, k, i)) s += eps_cap(sys, u, j);
  return 2.0 * s;
}

double rate_cap(const CacheSystem& sys) {
  return sys.delay > 0.0 ? sys.file_size / sys.delay : std::numeric_limits<double>::infinity();
}

double errh_power(const CacheSystem& sys, const Beamformers& g, std::size_t i) {
  double p = 0.0;
  for (std::size_t k : sys.served[i]) p += g[k][i].squaredNorm();
  return p;
}

double power_residual(const CacheSystem& sys, const Beamformers& g) {
  double worst = -sys.max_power;
  for (std::size_t i : sys.errhs) worst = std::max(worst, errh_power(sys, g, i) - sys.max_power);
  return worst;
}

double objective_of(const CacheSystem& sys, const CacheIterate& it) {
  double s = 0.0;
  for (std::size_t i : sys.errhs) {
    for (std::size_t k : sys.served[i]) s += it.rate[k][i];
  }
  return s;
}

// Fills eps, chi, gamma_bar and r from g with every auxiliary constraint
// active (margin = 0) or strictly inside by a small margin.
void complete_iterate(const CacheSystem& sys, CacheIterate& it, const CacheIterate* expansion,
                      double margin) {
  for (std::size_t i : sys.errhs) {
    for (std::size_t kp : sys.eps_users[i]) {
      it.eps[kp][i] = leakage(sys, it.g, kp, i) + margin * sys.noise;
    }
  }
  const double cap = rate_cap(sys);
  for (std::size_t i : sys.errhs) {
    for (std::size_t k : sys.served[i]) {
      it.chi[k][i] = intra(sys, it.g, k, i) + noise_value(sys, it, k, i) + margin * sys.noise;
      double gamma = std::norm(sys.channel(k, i).dot(it.g[k][i])) / it.chi[k][i];
      if (expansion) {
        const auto phi = phi_lower_bound(expansion->g[k][i], expansion->chi[k][i], 1.0,
                                         sys.channel(k, i));
        gamma = phi(it.g[k][i], it.chi[k][i]);
      }
      if (margin > 0.0) {
        gamma = std::max(gamma - margin * (1.0 + std::abs(gamma)), 0.5 * (gamma - 1.0));
      }
      it.gamma_bar[k][i] = gamma;
      it.rate[k][i] = std::min(std::log2(1.0 + gamma), cap) - margin;
    }
  }
  it.objective = objective_of(sys, it);
}

// Strictly feasible solver start for the program expanded at `it`.
rvec strict_start(const CacheSystem& sys, const CacheSubproblem& sub, const CacheIterate& it) {
  CacheIterate s = it;
  for (std::size_t i : sys.errhs) {
    const double p = errh_power(sys, s.g, i);
    if (p > 0.999 * sys.max_power) {
      const double theta = std::sqrt(0.999 * sys.max_power / p);
      for (std::size_t k : sys.served[i]) s.g[k][i] *= theta;
    }
  }
  complete_iterate(sys, s, &it, 1e-3);
  return sub.pack(s);
}

}  // namespace

CacheIterate empty_iterate(const CacheSystem& sys) {
  CacheIterate it;
  const auto nt = static_cast<Eigen::Index>(sys.antennas);
  it.g.assign(sys.num_users, std::vector<cvec>(sys.num_errh, cvec::Zero(nt)));
  it.rate.assign(sys.num_users, std::vector<double>(sys.num_errh, 0.0));
  it.gamma_bar = it.rate;
  it.chi = it.rate;
  it.eps = it.rate;
  return it;
}

CacheIterate initial_iterate(const CacheSystem& sys) {
  CacheIterate it = empty_iterate(sys);
  const auto nt = static_cast<Eigen::Index>(sys.antennas);
  for (std::size_t i : sys.errhs) {
    const auto& users = sys.served[i];
    if (users.empty()) continue;
    const double amp = std::sqrt(sys.max_power / static_cast<double>(users.size()));
    for (std::size_t k : users) {
      const cvec& h = sys.channel(k, i);
      const double n = h.norm();
      cvec dir = cvec::Zero(nt);
      if (n > 0.0) {
        dir = h / n;
      } else {
        dir[0] = 1.0;
      }
      it.g[k][i] = amp * dir;
    }
  }
  complete_iterate(sys, it, nullptr, 0.0);
  return it;
}

CacheSubproblem build_program(const CacheSystem& sys, const CacheIterate& it) {
  CacheSubproblem sub;
  sub.antennas = sys.antennas;
  const std::vector<std::vector<int>> none(sys.num_users, std::vector<int>(sys.num_errh, -1));
  sub.g_index = sub.r_index = sub.gamma_index = sub.chi_index = sub.eps_index = none;
  auto& prog = sub.program;
  const int nt = static_cast<int>(sys.antennas);

  for (std::size_t i : sys.errhs) {
    for (std::size_t k : sys.served[i]) {
      const std::string tag = "[" + std::to_string(k) + "," + std::to_string(i) + "]";
      sub.g_index[k][i] = prog.add_variables(2 * nt, "g" + tag);
      sub.r_index[k][i] = prog.add_variables(1, "r" + tag);
      sub.gamma_index[k][i] = prog.add_variables(1, "gamma" + tag);
      sub.chi_index[k][i] = prog.add_variables(1, "chi" + tag);
    }
  }
  for (std::size_t i : sys.errhs) {
    for (std::size_t kp : sys.eps_users[i]) {
      sub.eps_index[kp][i] =
          prog.add_variables(1, "eps[" + std::to_string(kp) + "," + std::to_string(i) + "]");
    }
  }

  AffineForm objective;
  for (std::size_t i : sys.errhs) {
    for (std::size_t k : sys.served[i]) objective.add(sub.r_index[k][i], 1.0);
  }
  prog.set_objective(objective);

  for (std::size_t i : sys.errhs) {
    for (std::size_t k : sys.served[i]) {
      const int r = sub.r_index[k][i];
      const int gm = sub.gamma_index[k][i];
      const int chi = sub.chi_index[k][i];
      const cvec& h = sys.channel(k, i);
      prog.add_constraint(Atom::log_hypograph(AffineForm::var(r), AffineForm::var(gm), "rate"));
      const auto phi = phi_lower_bound(it.g[k][i], it.chi[k][i], 1.0, h);
      prog.add_constraint(Atom::affine(AffineForm::var(gm) + (-1.0) * phi.form(sub.g_index[k][i], chi),
                                       "sinr_bound"));
      std::vector<AffineForm> sq;
      for (std::size_t kp : sys.served[i]) {
        if (kp == k) continue;
        auto [re, im] = inner_product_forms(h, sub.g_index[kp][i]);
        sq.push_back(std::move(re));
        sq.push_back(std::move(im));
      }
      AffineForm lin(sys.noise);
      for (const auto& [u, j] : noise_terms(sys, k, i)) lin.add(sub.eps_index[u][j], 1.0);
      lin.add(chi, -1.0);
      prog.add_constraint(Atom::convex_quadratic(std::move(sq), std::move(lin), "interference"));
      if (sys.delay > 0.0) {
        prog.add_constraint(
            Atom::affine(AffineForm::var(r, sys.delay) + AffineForm(-sys.file_size), "file_size"));
      }
      prog.add_constraint(
          Atom::affine(AffineForm::var(chi) + AffineForm(-chi_cap(sys, k, i)), "chi_cap"));
    }
    if (!sys.served[i].empty()) {
      std::vector<AffineForm> sq;
      for (std::size_t k : sys.served[i]) {
        for (int j = 0; j < 2 * nt; ++j) sq.push_back(AffineForm::var(sub.g_index[k][i] + j));
      }
      prog.add_constraint(
          Atom::convex_quadratic(std::move(sq), AffineForm(-sys.max_power), "power"));
    }
    for (std::size_t kp : sys.eps_users[i]) {
      const int e = sub.eps_index[kp][i];
      std::vector<AffineForm> sq;
      for (std::size_t k : sys.served[i]) {
        auto [re, im] = inner_product_forms(sys.channel(kp, i), sub.g_index[k][i]);
        sq.push_back(std::move(re));
        sq.push_back(std::move(im));
      }
      prog.add_constraint(
          Atom::convex_quadratic(std::move(sq), AffineForm::var(e, -1.0), "leakage"));
      prog.add_constraint(
          Atom::affine(AffineForm::var(e) + AffineForm(-eps_cap(sys, kp, i)), "eps_cap"));
    }
  }
  return sub;
}

ScaRun run_sca(const CacheSystem& sys, double eta, std::size_t max_iterations, int errh_tag,
               const cvx::SolverOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };
  ScaRun run;
  run.iterate = initial_iterate(sys);
  // Step 1 starts the rate sum at zero; the iterate keeps its rates so the
  // first program has a feasible point.
  double previous = 0.0;
  run.trace.push_back({0, previous, power_residual(sys, run.iterate.g), elapsed(), errh_tag, {}});

  bool any_user = false;
  for (std::size_t i : sys.errhs) any_user = any_user || !sys.served[i].empty();
  if (!any_user) return run;

  std::optional<rvec> warm;
  run.status = SolveStatus::iteration_limit;
  try {
  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    const CacheSubproblem sub = build_program(sys, run.iterate);
    const rvec start = warm ? *warm : strict_start(sys, sub, run.iterate);
    cvx::SolverResult res = cvx::solve(sub.program, start, options);
    if (!res.ok() && warm) {
      res = cvx::solve(sub.program, strict_start(sys, sub, run.iterate), options);
    }
    if (!res.ok()) {
      run.status = SolveStatus::failed;
      run.message = "cache-level subproblem " + std::to_string(iter) + ": " +
                    cvx::to_string(res.status) + " " + res.message;
      return run;
    }
    rvec x = res.x;
    // The warm start is feasible for this program too; keep it if the solver
    // returned something worse by rounding.
    if (warm && sub.program.objective().eval(*warm) > res.objective) x = *warm;
    CacheIterate next = run.iterate;
    sub.unpack(x, next);
    next.objective = objective_of(sys, next);
    const double delta = next.objective - previous;
    previous = next.objective;
    run.iterate = std::move(next);
    run.iterations = iter;
    run.trace.push_back(
        {iter, run.iterate.objective, power_residual(sys, run.iterate.g), elapsed(), errh_tag, {}});
    warm = x;
    if (std::abs(delta) <= eta) {
      run.status = SolveStatus::converged;
      break;
    }
  }
  } catch (const Error& e) {
    run.status = SolveStatus::failed;
    run.message = e.what();
  }
  return run;
}

}  // namespace detail

namespace {

detail::CacheSystem central_system(const Instance& inst) {
  detail::CacheSystem sys;
  const auto& p = inst.params;
  sys.num_users = inst.num_users();
  sys.num_errh = inst.num_errh();
  sys.antennas = p.antennas;
  sys.max_power = p.max_power;
  sys.noise = p.noise_power;
  sys.file_size = p.file_size;
  sys.delay = p.delay;
  for (std::size_t i = 0; i < sys.num_errh; ++i) sys.errhs.push_back(i);
  sys.served = inst.schedule.served;
  // Only leakage towards users served elsewhere reaches an objective term;
  // eps for other members of K~_i would be decoupled free variables.
  sys.eps_users.assign(sys.num_errh, {});
  for (std::size_t i = 0; i < sys.num_errh; ++i) {
    for (std::size_t kp : inst.schedule.leakage[i]) {
      if (inst.schedule.serving_errh(kp)) sys.eps_users[i].push_back(kp);
    }
  }
  sys.local_noise = false;
  const auto* h = &inst.channels.h;
  sys.channel = [h](std::size_t k, std::size_t i) -> const cvec& { return (*h)[k][i]; };
  return sys;
}

}  // namespace

CacheSubproblem build_subproblem(const Instance& inst, const CacheIterate& iterate) {
  return detail::build_program(central_system(inst), iterate);
}

CacheIterate initial_cache_iterate(const Instance& inst) {
  return detail::initial_iterate(central_system(inst));
}

CacheLevelSolution solve_cache_central(const Instance& inst, const cvx::SolverOptions& options) {
  const auto sys = central_system(inst);
  auto run = detail::run_sca(sys, inst.params.stop_threshold, inst.params.max_iterations, -1,
                             options);
  CacheLevelSolution sol = CacheLevelSolution::zeros(inst);
  sol.g = run.iterate.g;
  sol.gamma_bar = run.iterate.gamma_bar;
  sol.chi = run.iterate.chi;
  sol.eps = run.iterate.eps;
  sol.trace = std::move(run.trace);
  sol.iterations = run.iterations;
  sol.status = run.status;
  sol.message = std::move(run.message);
  score_cache_rates(sol, inst);
  return sol;
}

}  // namespace fran
