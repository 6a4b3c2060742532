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

#include "fran/sca_network.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fran {

using cvx::AffineForm;
using cvx::Atom;

TangentBound psi_lower_bound(const cvec& u_exp, double mu_exp, const cvec& h) {
  return tangent_bound(u_exp, mu_exp, h);
}

double phi_logdet_upper(const cmat& a, const cmat& b) { return logdet_upper(a, b); }

std::vector<double> remaining_caps(const Instance& inst, const CacheLevelSolution* cache) {
  const double s = inst.params.file_size;
  std::vector<double> cap(inst.num_users(), s);
  if (!cache) return cap;
  for (std::size_t k = 0; k < cap.size(); ++k) {
    cap[k] = std::max(s - inst.params.delay * cache->max_rate(k), 0.0);
  }
  return cap;
}

namespace {

bool active(const std::vector<double>& cap, std::size_t k) { return cap[k] > 0.0; }

// Block u_{k,i} is an optimization variable.
bool block_free(const Instance& inst, const std::vector<double>& cap, std::size_t k,
                std::size_t i) {
  return active(cap, k) && (inst.params.fronthaul_capacity > 0.0 || inst.user_cached_at(k, i));
}

bool needs_fronthaul_row(const Instance& inst, const std::vector<double>& cap, std::size_t i) {
  if (!(inst.params.fronthaul_capacity > 0.0)) return false;
  for (std::size_t k = 0; k < inst.num_users(); ++k) {
    if (active(cap, k) && !inst.user_cached_at(k, i)) return true;
  }
  return false;
}

double interference(const Instance& inst, const NetworkIterate& it, std::size_t k) {
  const cvec hk = inst.channels.stacked(k);
  double s = inst.params.noise_power;
  for (std::size_t kp = 0; kp < it.u.size(); ++kp) {
    if (kp != k) s += std::norm(hk.dot(it.u[kp]));
  }
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    s += inst.channels.h[k][i].cwiseAbs2().dot(it.omega[i]);
  }
  return s;
}

double mu_cap(const Instance& inst, std::size_t k) {
  const auto& p = inst.params;
  return 2.0 * (p.noise_power +
                static_cast<double>(inst.num_errh()) * p.max_power *
                    inst.channels.stacked(k).squaredNorm());
}

double objective_of(const NetworkIterate& it) {
  double s = 0.0;
  for (std::size_t k = 0; k < it.rate.size(); ++k) {
    if (it.cap[k] > 0.0) s += it.rate[k];
  }
  return s;
}

std::vector<double> exact_loads(const Instance& inst, const NetworkIterate& it) {
  std::vector<double> loads;
  for (std::size_t i = 0; i < inst.num_errh(); ++i) {
    loads.push_back(fronthaul_load(it.u, it.omega, inst, i));
  }
  return loads;
}

// mu, iota and r from (u, omega); active or strictly inside by `margin`.
void complete_iterate(const Instance& inst, NetworkIterate& it, const NetworkIterate* expansion,
                      double margin) {
  const std::size_t nu = inst.num_users();
  it.mu.assign(nu, 0.0);
  it.iota.assign(nu, 0.0);
  it.rate.assign(nu, 0.0);
  for (std::size_t k = 0; k < nu; ++k) {
    if (!active(it.cap, k)) continue;
    const cvec hk = inst.channels.stacked(k);
    it.mu[k] = interference(inst, it, k) + margin * inst.params.noise_power;
    double iota = std::norm(hk.dot(it.u[k])) / it.mu[k];
    if (expansion) {
      iota = psi_lower_bound(expansion->u[k], expansion->mu[k], hk)(it.u[k], it.mu[k]);
    }
    if (margin > 0.0) {
      iota = std::max(iota - margin * (1.0 + std::abs(iota)), 0.5 * (iota - 1.0));
    }
    it.iota[k] = iota;
    it.rate[k] = std::min(std::log2(1.0 + iota), it.cap[k]) - margin;
  }
  it.objective = objective_of(it);
}

bool strictly_feasible(const cvx::ConvexProgram& prog, const rvec& x) {
  for (const auto& a : prog.constraints()) {
    if (!a.in_domain(x) || !(a.value(x) < 0.0)) return false;
  }
  return true;
}

void scale_block(NetworkIterate& it, std::size_t i, std::size_t nt, double factor) {
  const auto n = static_cast<Eigen::Index>(nt);
  for (auto& u : it.u) u.segment(static_cast<Eigen::Index>(i) * n, n) *= factor;
}

// Scales u at eRRH i so that its total power is at most `budget`.
void fit_power(NetworkIterate& it, std::size_t i, std::size_t nt, double budget) {
  double up = 0.0;
  for (const auto& u : it.u) up += errh_block(u, i, nt).squaredNorm();
  const double room = budget - it.omega[i].sum();
  if (up > room && up > 0.0) scale_block(it, i, nt, std::sqrt(std::max(room, 0.0) / up));
}

}  // namespace

NetworkIterate initial_network_iterate(const Instance& inst, const std::vector<double>& cap) {
  const auto& p = inst.params;
  const std::size_t nu = inst.num_users();
  const std::size_t nr = inst.num_errh();
  const std::size_t nt = p.antennas;
  const auto ntt = static_cast<Eigen::Index>(nr * nt);
  NetworkIterate it;
  it.cap = cap;
  it.u.assign(nu, cvec::Zero(ntt));
  it.omega.assign(nr, rvec::Constant(static_cast<Eigen::Index>(nt), 0.05 * p.max_power / nt));

  std::size_t num_active = 0;
  for (std::size_t k = 0; k < nu; ++k) num_active += active(cap, k) ? 1 : 0;
  if (num_active > 0) {
    const double amp = std::sqrt(p.max_power * static_cast<double>(nr) / num_active);
    for (std::size_t k = 0; k < nu; ++k) {
      if (!active(cap, k)) continue;
      cvec dir = cvec::Zero(ntt);
      int first_free = -1;
      for (std::size_t i = 0; i < nr; ++i) {
        if (!block_free(inst, cap, k, i)) continue;
        if (first_free < 0) first_free = static_cast<int>(i * nt);
        dir.segment(static_cast<Eigen::Index>(i * nt), static_cast<Eigen::Index>(nt)) =
            inst.channels.h[k][i];
      }
      const double n = dir.norm();
      if (n > 0.0) {
        it.u[k] = amp * dir / n;
      } else if (first_free >= 0) {
        it.u[k][first_free] = amp;
      }
    }
  }
  const double budget = 0.9 * p.max_power;
  for (std::size_t i = 0; i < nr; ++i) {
    fit_power(it, i, nt, budget);
    if (!needs_fronthaul_row(inst, cap, i)) continue;
    const double target = 0.9 * p.fronthaul_capacity;
    for (int guard = 0; guard < 400 && fronthaul_load(it.u, it.omega, inst, i) > target; ++guard) {
      if (2.0 * it.omega[i].sum() <= 0.45 * p.max_power) {
        it.omega[i] *= 2.0;
        fit_power(it, i, nt, budget);
      } else {
        scale_block(it, i, nt, 0.5);
      }
    }
  }
  complete_iterate(inst, it, nullptr, 0.0);
  return it;
}

rvec NetworkSubproblem::pack(const NetworkIterate& it) const {
  rvec x = rvec::Zero(program.num_variables());
  const auto nt = static_cast<Eigen::Index>(antennas);
  for (std::size_t k = 0; k < u_index.size(); ++k) {
    for (std::size_t i = 0; i < u_index[k].size(); ++i) {
      if (u_index[k][i] >= 0) {
        write_complex(x, u_index[k][i], it.u[k].segment(static_cast<Eigen::Index>(i) * nt, nt));
      }
    }
    if (r_index[k] >= 0) {
      x[r_index[k]] = it.rate[k];
      x[iota_index[k]] = it.iota[k];
      x[mu_index[k]] = it.mu[k];
    }
  }
  for (std::size_t i = 0; i < omega_index.size(); ++i) {
    x.segment(omega_index[i], nt) = it.omega[i];
  }
  return x;
}

void NetworkSubproblem::unpack(const rvec& x, NetworkIterate& it) const {
  const auto nt = static_cast<Eigen::Index>(antennas);
  for (std::size_t k = 0; k < u_index.size(); ++k) {
    for (std::size_t i = 0; i < u_index[k].size(); ++i) {
      auto seg = it.u[k].segment(static_cast<Eigen::Index>(i) * nt, nt);
      if (u_index[k][i] >= 0) {
        seg = read_complex(x, u_index[k][i], nt);
      } else {
        seg.setZero();
      }
    }
    if (r_index[k] >= 0) {
      it.rate[k] = x[r_index[k]];
      it.iota[k] = x[iota_index[k]];
      it.mu[k] = x[mu_index[k]];
    }
  }
  for (std::size_t i = 0; i < omega_index.size(); ++i) {
    it.omega[i] = x.segment(omega_index[i], nt);
  }
  it.objective = objective_of(it);
}

NetworkSubproblem build_subproblem(const Instance& inst, const NetworkIterate& it) {
  const auto& p = inst.params;
  const std::size_t nu = inst.num_users();
  const std::size_t nr = inst.num_errh();
  const std::size_t nt = p.antennas;
  const int ntv = static_cast<int>(nt);
  NetworkSubproblem sub;
  sub.antennas = nt;
  sub.u_index.assign(nu, std::vector<int>(nr, -1));
  sub.r_index.assign(nu, -1);
  sub.iota_index.assign(nu, -1);
  sub.mu_index.assign(nu, -1);
  sub.fronthaul_row.assign(nr, false);
  auto& prog = sub.program;

  for (std::size_t k = 0; k < nu; ++k) {
    if (!active(it.cap, k)) continue;
    for (std::size_t i = 0; i < nr; ++i) {
      if (block_free(inst, it.cap, k, i)) {
        sub.u_index[k][i] = prog.add_variables(
            2 * ntv, "u[" + std::to_string(k) + "," + std::to_string(i) + "]");
      }
    }
    const std::string tag = "[" + std::to_string(k) + "]";
    sub.r_index[k] = prog.add_variables(1, "r" + tag);
    sub.iota_index[k] = prog.add_variables(1, "iota" + tag);
    sub.mu_index[k] = prog.add_variables(1, "mu" + tag);
  }
  for (std::size_t i = 0; i < nr; ++i) {
    sub.omega_index.push_back(prog.add_variables(ntv, "omega[" + std::to_string(i) + "]"));
  }

  AffineForm objective;
  for (std::size_t k = 0; k < nu; ++k) {
    if (sub.r_index[k] >= 0) objective.add(sub.r_index[k], 1.0);
  }
  prog.set_objective(objective);

  // Re / Im of h_k^H u_{k'} over the free blocks of u_{k'}.
  auto inner = [&](std::size_t k, std::size_t kp) {
    AffineForm re;
    AffineForm im;
    for (std::size_t i = 0; i < nr; ++i) {
      if (sub.u_index[kp][i] < 0) continue;
      auto [r, m] = inner_product_forms(inst.channels.h[k][i], sub.u_index[kp][i]);
      re += r;
      im += m;
    }
    return std::pair{re, im};
  };

  for (std::size_t k = 0; k < nu; ++k) {
    if (sub.r_index[k] < 0) continue;
    const int r = sub.r_index[k];
    const int io = sub.iota_index[k];
    const int mu = sub.mu_index[k];
    prog.add_constraint(Atom::log_hypograph(AffineForm::var(r), AffineForm::var(io), "rate"));

    const auto psi = psi_lower_bound(it.u[k], it.mu[k], inst.channels.stacked(k));
    AffineForm bound = AffineForm::var(io);
    for (std::size_t i = 0; i < nr; ++i) {
      const int b = sub.u_index[k][i];
      if (b < 0) continue;
      for (int n = 0; n < ntv; ++n) {
        const cplx l = psi.lin[static_cast<Eigen::Index>(i * nt) + n];
        if (l.real() != 0.0) bound.add(b + n, -l.real());
        if (l.imag() != 0.0) bound.add(b + ntv + n, -l.imag());
      }
    }
    bound.add(mu, psi.slope);
    prog.add_constraint(Atom::affine(std::move(bound), "sinr_bound"));

    std::vector<AffineForm> sq;
    for (std::size_t kp = 0; kp < nu; ++kp) {
      if (kp == k || sub.r_index[kp] < 0) continue;
      auto [re, im] = inner(k, kp);
      if (!re.empty()) sq.push_back(std::move(re));
      if (!im.empty()) sq.push_back(std::move(im));
    }
    AffineForm lin(p.noise_power);
    for (std::size_t i = 0; i < nr; ++i) {
      for (int n = 0; n < ntv; ++n) {
        const double w = std::norm(inst.channels.h[k][i][n]);
        if (w != 0.0) lin.add(sub.omega_index[i] + n, w);
      }
    }
    lin.add(mu, -1.0);
    prog.add_constraint(Atom::convex_quadratic(std::move(sq), std::move(lin), "interference"));
    prog.add_constraint(Atom::affine(AffineForm::var(r) + AffineForm(-it.cap[k]), "remaining_file"));
    prog.add_constraint(Atom::affine(AffineForm::var(mu) + AffineForm(-mu_cap(inst, k)), "mu_cap"));
  }

  for (std::size_t i = 0; i < nr; ++i) {
    const int w0 = sub.omega_index[i];
    std::vector<AffineForm> sq;
    for (std::size_t k = 0; k < nu; ++k) {
      const int b = sub.u_index[k][i];
      if (b < 0) continue;
      for (int j = 0; j < 2 * ntv; ++j) sq.push_back(AffineForm::var(b + j));
    }
    AffineForm lin(-p.max_power);
    for (int n = 0; n < ntv; ++n) lin.add(w0 + n, 1.0);
    prog.add_constraint(Atom::convex_quadratic(std::move(sq), std::move(lin), "power"));
    for (int n = 0; n < ntv; ++n) {
      prog.add_constraint(
          Atom::affine(AffineForm::var(w0 + n, -1.0) + AffineForm(1e-9 * p.max_power), "omega_floor"));
    }

    if (!needs_fronthaul_row(inst, it.cap, i)) continue;
    sub.fronthaul_row[i] = true;
    const cmat bbar = fronthaul_covariance(it.u, it.omega[i], inst, i);
    Eigen::LLT<cmat> llt(bbar);
    if (llt.info() != Eigen::Success) throw DomainError("fronthaul expansion matrix is singular");
    const cmat binv = llt.solve(cmat::Identity(ntv, ntv));
    const cmat scaled = 0.5 * (binv + binv.adjoint()) / kLn2;
    Eigen::LLT<cmat> lf(scaled);
    if (lf.info() != Eigen::Success) throw DomainError("fronthaul expansion inverse is singular");
    const cmat L = lf.matrixL();
    std::vector<AffineForm> fsq;
    for (std::size_t k = 0; k < nu; ++k) {
      const int b = sub.u_index[k][i];
      if (b < 0 || inst.user_cached_at(k, i)) continue;
      for (int m = 0; m < ntv; ++m) {
        // (L^H u)_m = l_m^H u with l_m the m-th column of L
        auto [re, im] = inner_product_forms(L.col(m), b);
        fsq.push_back(std::move(re));
        fsq.push_back(std::move(im));
      }
    }
    AffineForm flin(log2_det(bbar) - static_cast<double>(nt) / kLn2 - p.fronthaul_capacity);
    std::vector<cvx::LogTerm> logs;
    for (int n = 0; n < ntv; ++n) {
      flin.add(w0 + n, binv(n, n).real() / kLn2);
      logs.push_back({1.0, AffineForm::var(w0 + n)});
    }
    prog.add_constraint(Atom::neg_log(std::move(fsq), std::move(flin), std::move(logs), "fronthaul"));
  }
  return sub;
}

NetworkLevelSolution solve_network(const Instance& inst, const CacheLevelSolution* cache,
                                   const cvx::SolverOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };
  const auto& p = inst.params;
  NetworkLevelSolution sol;
  sol.cap = remaining_caps(inst, cache);
  NetworkIterate it = initial_network_iterate(inst, sol.cap);

  auto power_residual = [&](const NetworkIterate& x) {
    return max_power_residual(x.u, x.omega, inst);
  };
  // Rate sum starts at zero as in step 1.
  double previous = 0.0;
  sol.trace.push_back({0, previous, power_residual(it), elapsed(), -1, exact_loads(inst, it)});

  const bool any_active =
      std::any_of(sol.cap.begin(), sol.cap.end(), [](double c) { return c > 0.0; });
  std::optional<rvec> warm;
  sol.status = any_active ? SolveStatus::iteration_limit : SolveStatus::converged;
  try {
    for (std::size_t iter = 1; any_active && iter <= p.max_iterations; ++iter) {
      const NetworkSubproblem sub = build_subproblem(inst, it);
      // Pull the previous optimum off the power and fronthaul boundary; the
      // barrier method crawls when started with tiny slacks.
      NetworkIterate s = it;
      for (auto& u : s.u) u *= 1.0 - 1e-3;
      complete_iterate(inst, s, &it, 1e-3);
      rvec start = sub.pack(s);
      if (warm && !strictly_feasible(sub.program, start)) start = *warm;
      cvx::SolverResult res = cvx::solve(sub.program, start, options);
      if (!res.ok()) {
        sol.status = SolveStatus::failed;
        sol.message = "network-level subproblem " + std::to_string(iter) + ": " +
                      cvx::to_string(res.status) + " " + res.message;
        break;
      }
      rvec x = res.x;
      if (warm && sub.program.objective().eval(*warm) > res.objective) x = *warm;
      NetworkIterate next = it;
      sub.unpack(x, next);
      const double delta = next.objective - previous;
      previous = next.objective;
      it = std::move(next);
      sol.iterations = iter;
      sol.trace.push_back(
          {iter, it.objective, power_residual(it), elapsed(), -1, exact_loads(inst, it)});
      warm = x;
      if (std::abs(delta) <= p.stop_threshold) {
        sol.status = SolveStatus::converged;
        break;
      }
    }
  } catch (const Error& e) {
    sol.status = SolveStatus::failed;
    sol.message = e.what();
  }
  sol.u = it.u;
  sol.omega = it.omega;
  score_network_rates(sol, inst);
  return sol;
}

}  // namespace fran
