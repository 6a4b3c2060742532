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
#include <optional>
#include <string>
#include <vector>

#include "fran/common.hpp"

namespace fran::cvx {

// Sparse real affine form sum_j coef[j] * x[idx[j]] + constant.
// Repeated indices are allowed and add up.
struct AffineForm {
  std::vector<int> idx;
  std::vector<double> coef;
  double constant = 0.0;

  AffineForm() = default;
  explicit AffineForm(double c) : constant(c) {}

  static AffineForm var(int index, double c = 1.0);

  AffineForm& add(int index, double c);
  AffineForm& operator+=(const AffineForm& other);
  AffineForm& operator*=(double s);
  AffineForm& operator+=(double c) {
    constant += c;
    return *this;
  }

  double eval(const rvec& x) const;
  bool empty() const { return idx.empty(); }
};

AffineForm operator+(AffineForm a, const AffineForm& b);
AffineForm operator*(double s, AffineForm a);

enum class AtomKind {
  affine,            // a.x + b <= 0
  convex_quadratic,  // sum_q sq_q(x)^2 + a.x + b <= 0
  quad_over_lin,     // sum_q sq_q(x)^2 <= den(x) * lin(x), den(x) > 0
  log_hypograph,     // t(x) <= log2(1 + s(x))
  neg_log,           // sum_q sq_q(x)^2 + a.x + b - sum_m w_m log2(arg_m(x)) <= 0
};

const char* to_string(AtomKind k);

// -w * log2(arg(x)), arg > 0
struct LogTerm {
  double weight = 1.0;
  AffineForm arg;
};

// One convex constraint f(x) <= 0 stored as
//   f(x) = linear(x) + sum_q squares_q(x)^2 / den(x) - sum_m w_m log2(arg_m(x))
// with den == 1 unless kind == quad_over_lin. Quadratic parts are always
// kept as lists of affine factors, so they are PSD by construction.
struct Atom {
  AtomKind kind = AtomKind::affine;
  std::string name;
  AffineForm linear;
  std::vector<AffineForm> squares;
  std::optional<AffineForm> denominator;
  std::vector<LogTerm> logs;

  static Atom affine(AffineForm a, std::string name = {});
  static Atom convex_quadratic(std::vector<AffineForm> squares, AffineForm linear,
                               std::string name = {});
  // ||squares||^2 <= den * lin with den > 0 (and hence lin >= 0).
  static Atom quad_over_lin(std::vector<AffineForm> squares, AffineForm den, AffineForm lin,
                            std::string name = {});
  static Atom log_hypograph(AffineForm t, AffineForm s, std::string name = {});
  static Atom neg_log(std::vector<AffineForm> squares, AffineForm linear,
                      std::vector<LogTerm> logs, std::string name = {});

  // True if every log argument and the denominator are strictly positive.
  bool in_domain(const rvec& x) const;
  // Throws DomainError outside the domain.
  double value(const rvec& x) const;
  // Dense gradient / Hessian over the full variable vector.
  rvec gradient(const rvec& x) const;
  rmat hessian(const rvec& x) const;
  int max_index() const;
};

// Linear objective to maximize subject to atoms f_j(x) <= 0.
class ConvexProgram {
 public:
  // Returns the index of the first new variable.
  int add_variables(int count, const std::string& name = {});
  void set_objective(AffineForm objective) { objective_ = std::move(objective); }
  // Returns the constraint index. Throws InvalidParams on non-finite data
  // or out-of-range variable indices.
  std::size_t add_constraint(Atom atom);

  int num_variables() const { return num_vars_; }
  const AffineForm& objective() const { return objective_; }
  const std::vector<Atom>& constraints() const { return atoms_; }
  const std::string& variable_name(int index) const;

  // One atom per line, for offline inspection.
  void dump(std::ostream& out) const;

 private:
  int num_vars_ = 0;
  std::vector<std::string> names_;
  AffineForm objective_;
  std::vector<Atom> atoms_;
};

struct SolverOptions {
  int max_iterations = 200;          // Newton steps, both phases together
  double barrier_factor = 10.0;      // t <- t * factor between centering runs
  double gap_tolerance = 1e-7;       // m/t <= tol * (1 + |objective|)
  double centering_tolerance = 1e-10;  // lambda^2 / 2
  double kkt_tolerance = 1e-6;
  double regularization = 1e-10;
  double armijo = 0.01;
  double backtrack = 0.5;
  int polish_steps = 20;             // extra centering if KKT is above tolerance
};

enum class SolverStatus { optimal, infeasible, iteration_limit, numerical_failure };

const char* to_string(SolverStatus s);

struct KktResiduals {
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double complementary_slackness = 0.0;
  double dual_feasibility = 0.0;
  double max() const;
};

// Barrier value after each accepted Newton step. `stage` counts centering
// runs; values are comparable only within a stage.
struct MeritSample {
  int stage = 0;
  double value = 0.0;
};

struct SolverResult {
  SolverStatus status = SolverStatus::numerical_failure;
  rvec x;
  rvec duals;  // one per constraint
  double objective = 0.0;
  double kkt_residual = 0.0;  // max KKT residual with the objective scaled to unit max coefficient
  double gap = 0.0;  // m / t at termination
  int iterations = 0;
  int phase1_iterations = 0;
  std::vector<MeritSample> merit;
  std::string message;

  bool ok() const { return status == SolverStatus::optimal; }
};

// Log-barrier path following. warm_start must lie in the domain of every
// log atom (strict feasibility is not required; phase I runs if needed).
// Without a warm start the origin is used.
SolverResult solve(const ConvexProgram& prog, const std::optional<rvec>& warm_start = std::nullopt,
                   const SolverOptions& options = {});

// KKT residuals in max norm for the problem: minimize -c.x s.t. f_j(x) <= 0.
KktResiduals kkt_residuals(const ConvexProgram& prog, const rvec& x, const rvec& duals);

// Max relative error of the analytic gradient and Hessian against central
// finite differences, relative to max(1, |analytic|).
double gradcheck(const Atom& atom, const rvec& x, double step = 1e-5);

}  // namespace fran::cvx
