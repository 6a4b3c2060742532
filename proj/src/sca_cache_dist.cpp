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

#include "fran/sca_cache_dist.hpp"

#include <future>

#include "cache_system.hpp"

namespace fran {

LocalInstance LocalInstance::from(const Instance& inst, std::size_t errh) {
  if (errh >= inst.num_errh()) throw InvalidParams("eRRH index out of range");
  LocalInstance local;
  local.errh = errh;
  local.num_users = inst.num_users();
  local.params = inst.params;
  local.h.reserve(inst.num_users());
  for (std::size_t k = 0; k < inst.num_users(); ++k) local.h.push_back(inst.channels.h[k][errh]);
  local.served = inst.schedule.served[errh];
  local.leakage = inst.schedule.leakage[errh];
  return local;
}

namespace {

detail::CacheSystem local_system(const LocalInstance& local, std::size_t num_errh) {
  detail::CacheSystem sys;
  const auto& p = local.params;
  sys.num_users = local.num_users;
  sys.num_errh = num_errh;
  sys.antennas = p.antennas;
  sys.max_power = p.max_power;
  sys.noise = p.noise_power;
  sys.file_size = p.file_size;
  sys.delay = p.delay;
  sys.errhs = {local.errh};
  sys.served.assign(num_errh, {});
  sys.eps_users.assign(num_errh, {});
  sys.served[local.errh] = local.served;
  sys.eps_users[local.errh] = local.leakage;
  sys.local_noise = true;
  const auto* h = &local.h;
  const std::size_t own = local.errh;
  sys.channel = [h, own](std::size_t k, std::size_t i) -> const cvec& {
    if (i != own) throw DomainError("local cache-level loop asked for a foreign channel");
    return (*h)[k];
  };
  return sys;
}

}  // namespace

CacheSubproblem build_local_subproblem(const LocalInstance& local, const CacheIterate& iterate) {
  const std::size_t num_errh = iterate.g.empty() ? local.errh + 1 : iterate.g.front().size();
  return detail::build_program(local_system(local, num_errh), iterate);
}

CacheIterate initial_local_iterate(const LocalInstance& local, std::size_t num_errh) {
  return detail::initial_iterate(local_system(local, num_errh));
}

CacheLevelSolution solve_cache_decentral(const Instance& inst, const cvx::SolverOptions& options) {
  const std::size_t nr = inst.num_errh();
  const auto& p = inst.params;
  std::vector<LocalInstance> locals;
  locals.reserve(nr);
  for (std::size_t i = 0; i < nr; ++i) locals.push_back(LocalInstance::from(inst, i));

  std::vector<std::future<detail::ScaRun>> jobs;
  jobs.reserve(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      return detail::run_sca(local_system(locals[i], nr), p.stop_threshold, p.max_iterations,
                             static_cast<int>(i), options);
    }));
  }

  CacheLevelSolution sol = CacheLevelSolution::zeros(inst);
  sol.errh_status.assign(nr, SolveStatus::converged);
  for (std::size_t i = 0; i < nr; ++i) {
    detail::ScaRun run = jobs[i].get();
    for (std::size_t k = 0; k < inst.num_users(); ++k) {
      sol.g[k][i] = run.iterate.g[k][i];
      sol.gamma_bar[k][i] = run.iterate.gamma_bar[k][i];
      sol.chi[k][i] = run.iterate.chi[k][i];
      sol.eps[k][i] = run.iterate.eps[k][i];
    }
    sol.trace.insert(sol.trace.end(), run.trace.begin(), run.trace.end());
    sol.iterations = std::max(sol.iterations, run.iterations);
    sol.errh_status[i] = run.status;
    if (run.status == SolveStatus::failed) {
      sol.status = SolveStatus::failed;
      if (!sol.message.empty()) sol.message += "; ";
      sol.message += "eRRH " + std::to_string(i) + ": " + run.message;
    } else if (run.status == SolveStatus::iteration_limit && sol.status != SolveStatus::failed) {
      sol.status = SolveStatus::iteration_limit;
    }
  }
  score_cache_rates(sol, inst);
  return sol;
}

}  // namespace fran
