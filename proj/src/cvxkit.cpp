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

#include "fran/cvxkit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

namespace fran::cvx {

AffineForm AffineForm::var(int index, double c) {
  AffineForm a;
  a.add(index, c);
  return a;
}

AffineForm& AffineForm::add(int index, double c) {
  idx.push_back(index);
  coef.push_back(c);
  return *this;
}

AffineForm& AffineForm::operator+=(const AffineForm& other) {
  idx.insert(idx.end(), other.idx.begin(), other.idx.end());
  coef.insert(coef.end(), other.coef.begin(), other.coef.end());
  constant += other.constant;
  return *this;
}

AffineForm& AffineForm::operator*=(double s) {
  for (auto& c : coef) c *= s;
  constant *= s;
  return *this;
}

double AffineForm::eval(const rvec& x) const {
  double v = constant;
  for (std::size_t j = 0; j < idx.size(); ++j) v += coef[j] * x[idx[j]];
  return v;
}

AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
AffineForm operator*(double s, AffineForm a) { return a *= s; }

const char* to_string(AtomKind k) {
  switch (k) {
    case AtomKind::affine: return "affine";
    case AtomKind::convex_quadratic: return "convex_quadratic";
    case AtomKind::quad_over_lin: return "quad_over_lin";
    case AtomKind::log_hypograph: return "log_hypograph";
    case AtomKind::neg_log: return "neg_log";
  }
  return "unknown";
}

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::iteration_limit: return "iteration-limit";
    case SolverStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

double KktResiduals::max() const {
  return std::max({stationarity, primal_feasibility, complementary_slackness, dual_feasibility});
}

Atom Atom::affine(AffineForm a, std::string name) {
  Atom atom;
  atom.kind = AtomKind::affine;
  atom.name = std::move(name);
  atom.linear = std::move(a);
  return atom;
}

Atom Atom::convex_quadratic(std::vector<AffineForm> squares, AffineForm linear, std::string name) {
  Atom atom;
  atom.kind = AtomKind::convex_quadratic;
  atom.name = std::move(name);
  atom.squares = std::move(squares);
  atom.linear = std::move(linear);
  return atom;
}

Atom Atom::quad_over_lin(std::vector<AffineForm> squares, AffineForm den, AffineForm lin,
                         std::string name) {
  Atom atom;
  atom.kind = AtomKind::quad_over_lin;
  atom.name = std::move(name);
  atom.squares = std::move(squares);
  atom.denominator = std::move(den);
  atom.linear = -1.0 * std::move(lin);
  return atom;
}

Atom Atom::log_hypograph(AffineForm t, AffineForm s, std::string name) {
  Atom atom;
  atom.kind = AtomKind::log_hypograph;
  atom.name = std::move(name);
  atom.linear = std::move(t);
  s += 1.0;
  atom.logs.push_back({1.0, std::move(s)});
  return atom;
}

Atom Atom::neg_log(std::vector<AffineForm> squares, AffineForm linear, std::vector<LogTerm> logs,
                   std::string name) {
  Atom atom;
  atom.kind = AtomKind::neg_log;
  atom.name = std::move(name);
  atom.squares = std::move(squares);
  atom.linear = std::move(linear);
  atom.logs = std::move(logs);
  return atom;
}

namespace {

// Atom data restricted to its support, stored densely.
struct Compiled {
  std::vector<int> support;
  rvec a;
  double b = 0.0;
  rmat F;
  rvec f0;
  rmat Q;  // 2 F^T F
  bool has_den = false;
  rvec d;
  double d0 = 0.0;
  struct Log {
    double w;
    rvec l;
    double l0;
  };
  std::vector<Log> logs;
};

void collect(const AffineForm& a, std::vector<int>& out) {
  out.insert(out.end(), a.idx.begin(), a.idx.end());
}

rvec densify(const AffineForm& a, const std::vector<int>& support) {
  rvec v = rvec::Zero(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < a.idx.size(); ++j) {
    const auto it = std::lower_bound(support.begin(), support.end(), a.idx[j]);
    v[it - support.begin()] += a.coef[j];
  }
  return v;
}

// slack >= 0 appends that variable with coefficient -1 (phase I form f - s).
Compiled compile(const Atom& atom, int slack = -1) {
  Compiled c;
  collect(atom.linear, c.support);
  for (const auto& s : atom.squares) collect(s, c.support);
  if (atom.denominator) collect(*atom.denominator, c.support);
  for (const auto& lt : atom.logs) collect(lt.arg, c.support);
  if (slack >= 0) c.support.push_back(slack);
  std::sort(c.support.begin(), c.support.end());
  c.support.erase(std::unique(c.support.begin(), c.support.end()), c.support.end());

  c.a = densify(atom.linear, c.support);
  c.b = atom.linear.constant;
  if (slack >= 0) {
    const auto it = std::lower_bound(c.support.begin(), c.support.end(), slack);
    c.a[it - c.support.begin()] -= 1.0;
  }
  const auto ns = static_cast<Eigen::Index>(c.support.size());
  const auto rows = static_cast<Eigen::Index>(atom.squares.size());
  c.F.resize(rows, ns);
  c.f0.resize(rows);
  for (Eigen::Index q = 0; q < rows; ++q) {
    c.F.row(q) = densify(atom.squares[q], c.support).transpose();
    c.f0[q] = atom.squares[q].constant;
  }
  c.Q = 2.0 * c.F.transpose() * c.F;
  if (atom.denominator) {
    c.has_den = true;
    c.d = densify(*atom.denominator, c.support);
    c.d0 = atom.denominator->constant;
  }
  for (const auto& lt : atom.logs) {
    c.logs.push_back({lt.weight, densify(lt.arg, c.support), lt.arg.constant});
  }
  return c;
}

rvec gather(const Compiled& c, const rvec& x) {
  rvec xl(static_cast<Eigen::Index>(c.support.size()));
  for (std::size_t j = 0; j < c.support.size(); ++j) xl[j] = x[c.support[j]];
  return xl;
}

// Returns false outside the domain. g and H are optional outputs.
bool eval(const Compiled& c, const rvec& xl, double& f, rvec* g, rmat* H) {
  double den = 1.0;
  if (c.has_den) {
    den = c.d.dot(xl) + c.d0;
    if (!(den > 0.0)) return false;
  }
  f = c.a.dot(xl) + c.b;
  if (g) *g = c.a;
  if (H) {
    if (c.F.rows() > 0) {
      *H = c.has_den ? rmat(c.Q / den) : c.Q;
    } else {
      H->setZero(xl.size(), xl.size());
    }
  }
  if (c.F.rows() > 0) {
    const rvec r = c.F * xl + c.f0;
    const double s = r.squaredNorm();
    f += s / den;
    if (g || H) {
      const rvec gs = 2.0 * (c.F.transpose() * r);
      if (g) {
        *g += gs / den;
        if (c.has_den) *g -= (s / (den * den)) * c.d;
      }
      if (H) {
        if (c.has_den) {
          H->noalias() -= (gs * c.d.transpose() + c.d * gs.transpose()) / (den * den);
          H->noalias() += (2.0 * s / (den * den * den)) * (c.d * c.d.transpose());
        }
      }
    }
  }
  for (const auto& lg : c.logs) {
    const double v = lg.l.dot(xl) + lg.l0;
    if (!(v > 0.0)) return false;
    f -= lg.w * std::log(v) / kLn2;
    if (g) *g -= (lg.w / (kLn2 * v)) * lg.l;
    if (H) H->noalias() += (lg.w / (kLn2 * v * v)) * (lg.l * lg.l.transpose());
  }
  return std::isfinite(f);
}

int atom_dim(const Atom& atom, Eigen::Index n) {
  return std::max(static_cast<int>(n), atom.max_index() + 1);
}

}  // namespace

int Atom::max_index() const {
  int m = -1;
  auto upd = [&](const AffineForm& a) {
    for (int j : a.idx) m = std::max(m, j);
  };
  upd(linear);
  for (const auto& s : squares) upd(s);
  if (denominator) upd(*denominator);
  for (const auto& lt : logs) upd(lt.arg);
  return m;
}

bool Atom::in_domain(const rvec& x) const {
  if (denominator && !(denominator->eval(x) > 0.0)) return false;
  for (const auto& lt : logs) {
    if (!(lt.arg.eval(x) > 0.0)) return false;
  }
  return true;
}

double Atom::value(const rvec& x) const {
  const Compiled c = compile(*this);
  double f = 0.0;
  if (!eval(c, gather(c, x), f, nullptr, nullptr)) {
    throw DomainError("atom `" + name + "` evaluated outside its domain");
  }
  return f;
}

rvec Atom::gradient(const rvec& x) const {
  const Compiled c = compile(*this);
  double f = 0.0;
  rvec gl;
  if (!eval(c, gather(c, x), f, &gl, nullptr)) {
    throw DomainError("atom `" + name + "` evaluated outside its domain");
  }
  rvec g = rvec::Zero(atom_dim(*this, x.size()));
  for (std::size_t j = 0; j < c.support.size(); ++j) g[c.support[j]] = gl[j];
  return g;
}

rmat Atom::hessian(const rvec& x) const {
  const Compiled c = compile(*this);
  double f = 0.0;
  rmat hl;
  if (!eval(c, gather(c, x), f, nullptr, &hl)) {
    throw DomainError("atom `" + name + "` evaluated outside its domain");
  }
  const int n = atom_dim(*this, x.size());
  rmat H = rmat::Zero(n, n);
  for (std::size_t p = 0; p < c.support.size(); ++p) {
    for (std::size_t q = 0; q < c.support.size(); ++q) H(c.support[p], c.support[q]) = hl(p, q);
  }
  return H;
}

int ConvexProgram::add_variables(int count, const std::string& name) {
  if (count < 0) throw InvalidParams("negative variable count");
  const int first = num_vars_;
  for (int j = 0; j < count; ++j) {
    names_.push_back(count == 1 ? name : name + "[" + std::to_string(j) + "]");
  }
  num_vars_ += count;
  return first;
}

const std::string& ConvexProgram::variable_name(int index) const { return names_.at(index); }

namespace {

void validate_form(const AffineForm& a, int n, const std::string& what) {
  if (a.idx.size() != a.coef.size()) throw InvalidParams(what + ": malformed affine form");
  if (!std::isfinite(a.constant)) throw InvalidParams(what + ": non-finite constant");
  for (std::size_t j = 0; j < a.idx.size(); ++j) {
    if (a.idx[j] < 0 || a.idx[j] >= n) throw InvalidParams(what + ": variable index out of range");
    if (!std::isfinite(a.coef[j])) throw InvalidParams(what + ": non-finite coefficient");
  }
}

}  // namespace

std::size_t ConvexProgram::add_constraint(Atom atom) {
  const std::string what = "constraint `" + atom.name + "`";
  validate_form(atom.linear, num_vars_, what);
  for (const auto& s : atom.squares) validate_form(s, num_vars_, what);
  if (atom.denominator) validate_form(*atom.denominator, num_vars_, what);
  for (const auto& lt : atom.logs) {
    validate_form(lt.arg, num_vars_, what);
    if (!std::isfinite(lt.weight) || lt.weight < 0.0) {
      throw InvalidParams(what + ": log weight must be finite and nonnegative");
    }
  }
  atoms_.push_back(std::move(atom));
  return atoms_.size() - 1;
}

namespace {

void print_form(std::ostream& out, const AffineForm& a) {
  out << '[';
  for (std::size_t j = 0; j < a.idx.size(); ++j) {
    if (j) out << ' ';
    out << a.coef[j] << "*x" << a.idx[j];
  }
  out << (a.idx.empty() ? "" : " ") << "+ " << a.constant << ']';
}

}  // namespace

void ConvexProgram::dump(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "variables " << num_vars_ << '\n' << "maximize ";
  print_form(out, objective_);
  out << '\n';
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    const Atom& a = atoms_[j];
    out << j << ' ' << to_string(a.kind) << ' ' << (a.name.empty() ? "-" : a.name) << " lin=";
    print_form(out, a.linear);
    for (const auto& s : a.squares) {
      out << " sq=";
      print_form(out, s);
    }
    if (a.denominator) {
      out << " den=";
      print_form(out, *a.denominator);
    }
    for (const auto& lt : a.logs) {
      out << " log=" << lt.weight << ':';
      print_form(out, lt.arg);
    }
    out << '\n';
  }
  out.precision(old);
}

namespace {

struct Problem {
  int n = 0;
  std::vector<Compiled> atoms;
  rvec c;  // maximize c.x
};

bool values(const Problem& p, const rvec& x, std::vector<double>& f) {
  f.resize(p.atoms.size());
  for (std::size_t j = 0; j < p.atoms.size(); ++j) {
    const auto& a = p.atoms[j];
    if (!eval(a, gather(a, x), f[j], nullptr, nullptr) || !(f[j] < 0.0)) return false;
  }
  return true;
}

// Gradient and Hessian of -sum log(-f_j) (the barrier part only).
void barrier_derivatives(const Problem& p, const rvec& x, rvec& g, rmat& H) {
  g.setZero(p.n);
  H.setZero(p.n, p.n);
  rvec gl;
  rmat hl;
  for (const auto& a : p.atoms) {
    double f = 0.0;
    const bool constant_hessian = !a.has_den && a.logs.empty();
    eval(a, gather(a, x), f, &gl, constant_hessian ? nullptr : &hl);
    const double w = 1.0 / (-f);
    const rmat& base = constant_hessian ? a.Q : hl;
    const std::size_t ns = a.support.size();
    for (std::size_t s = 0; s < ns; ++s) {
      const Eigen::Index cs = a.support[s];
      g[cs] += w * gl[s];
      const double gs = w * w * gl[s];
      for (std::size_t r = 0; r < ns; ++r) H(a.support[r], cs) += w * base(r, s) + gs * gl[r];
    }
  }
}

// Solves H dx = -g with Jacobi scaling and a regularized Cholesky.
bool newton_direction(const rmat& H, const rvec& g, double reg, rvec& dx) {
  const Eigen::Index n = H.rows();
  rvec d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d[j] = H(j, j) > 1e-300 ? 1.0 / std::sqrt(H(j, j)) : 1.0;
  }
  rmat hs = d.asDiagonal() * H * d.asDiagonal();
  const rvec rhs = -(d.asDiagonal() * g);
  for (double r = reg; r <= 1e-2; r *= 100.0) {
    rmat m = hs;
    m.diagonal().array() += r;
    Eigen::LLT<rmat> llt(m);
    if (llt.info() == Eigen::Success) {
      dx = d.asDiagonal() * llt.solve(rhs);
      if (dx.allFinite()) return true;
    }
  }
  return false;
}

double initial_t(const Problem& p, const rvec& x) {
  if (p.atoms.empty() || p.c.squaredNorm() == 0.0) return 1.0;
  rvec g;
  rmat H;
  barrier_derivatives(p, x, g, H);
  rvec hc;
  rvec hg;
  const rmat Hr = H + 1e-10 * (1.0 + H.diagonal().maxCoeff()) * rmat::Identity(p.n, p.n);
  Eigen::LDLT<rmat> ldlt(Hr);
  if (ldlt.info() != Eigen::Success) return 1.0;
  hc = ldlt.solve(p.c);
  hg = ldlt.solve(g);
  // minimize || -t c + g ||_{H^-1}
  const double num = p.c.dot(hg);
  const double den = p.c.dot(hc);
  const double t = num / den;
  if (!std::isfinite(t) || t <= 0.0) return 1.0;
  return std::clamp(t, 1e-6, 1e6);
}

struct PathOutcome {
  SolverStatus status = SolverStatus::numerical_failure;
  rvec x;
  double t = 1.0;
  bool early = false;
  std::string message;
};

// Centering from x at parameter t. Returns false on factorization failure.
enum class Centering { done, stalled, budget, failed, early };

Centering center(const Problem& p, rvec& x, double t, double tol, const SolverOptions& o,
                 int& used, int budget, int stage, std::vector<MeritSample>& merit,
                 const std::function<bool(const rvec&)>& stop_early) {
  std::vector<double> f_old;
  std::vector<double> f_new;
  values(p, x, f_old);
  double phi = -t * p.c.dot(x);
  for (double v : f_old) phi -= std::log(-v);
  rvec g;
  rmat H;
  rvec dx;
  int flat = 0;
  while (true) {
    if (used >= budget) return Centering::budget;
    barrier_derivatives(p, x, g, H);
    g.noalias() -= t * p.c;
    if (!newton_direction(H, g, o.regularization, dx)) return Centering::failed;
    const double slope = g.dot(dx);
    const double lambda2 = -slope;
    if (!(lambda2 > 0.0) || lambda2 / 2.0 <= tol) return Centering::done;
    double s = 1.0;
    bool accepted = false;
    double dphi = 0.0;
    const double cdx = p.c.dot(dx);
    while (s > 1e-14) {
      const rvec xn = x + s * dx;
      if (values(p, xn, f_new)) {
        dphi = -t * s * cdx;
        for (std::size_t j = 0; j < f_new.size(); ++j) dphi -= std::log(f_new[j] / f_old[j]);
        if (dphi <= o.armijo * s * slope) {
          x = xn;
          accepted = true;
          break;
        }
      }
      s *= o.backtrack;
    }
    ++used;
    if (!accepted) return Centering::stalled;
    std::swap(f_old, f_new);
    // Progress below the rounding level of the merit value.
    flat = std::abs(dphi) <= 1e-13 * (1.0 + std::abs(phi)) ? flat + 1 : 0;
    phi += dphi;
    merit.push_back({stage, phi});
    if (stop_early && stop_early(x)) return Centering::early;
    if (flat >= 3) return Centering::stalled;
  }
}

PathOutcome follow_path(const Problem& p, rvec x, const SolverOptions& o, int& used, int budget,
                        std::vector<MeritSample>& merit,
                        const std::function<bool(const rvec&)>& stop_early) {
  PathOutcome out;
  const double m = static_cast<double>(p.atoms.size());
  if (p.atoms.empty()) {
    out.x = std::move(x);
    if (p.c.squaredNorm() > 0.0) {
      out.status = SolverStatus::numerical_failure;
      out.message = "unbounded objective without constraints";
    } else {
      out.status = SolverStatus::optimal;
    }
    return out;
  }
  double t = initial_t(p, x);
  int stage = merit.empty() ? 0 : merit.back().stage + 1;
  while (true) {
    // Loose centering on intermediate stages, tight on the last one.
    const bool last = m / t <= o.gap_tolerance * (1.0 + std::abs(p.c.dot(x)));
    const double tol = last ? o.centering_tolerance : std::max(o.centering_tolerance, 1e-5);
    const Centering res = center(p, x, t, tol, o, used, budget, stage, merit, stop_early);
    if (res == Centering::early) {
      out.early = true;
      out.status = SolverStatus::optimal;
      break;
    }
    if (res == Centering::failed) {
      out.status = SolverStatus::numerical_failure;
      out.message = "Newton system could not be factorized";
      break;
    }
    if (res == Centering::budget) {
      out.status = SolverStatus::iteration_limit;
      out.message = "Newton iteration budget exhausted";
      break;
    }
    const double gap = m / t;
    if (gap <= o.gap_tolerance * (1.0 + std::abs(p.c.dot(x)))) {
      out.status = SolverStatus::optimal;
      break;
    }
    if (res == Centering::stalled && gap <= 1e-5 * (1.0 + std::abs(p.c.dot(x)))) {
      // Line search hit rounding noise close to the end of the path.
      out.status = SolverStatus::optimal;
      break;
    }
    t *= o.barrier_factor;
    ++stage;
  }
  out.x = std::move(x);
  out.t = t;
  return out;
}

Problem build_problem(const ConvexProgram& prog) {
  Problem p;
  p.n = prog.num_variables();
  p.c = rvec::Zero(p.n);
  const auto& obj = prog.objective();
  for (std::size_t j = 0; j < obj.idx.size(); ++j) p.c[obj.idx[j]] += obj.coef[j];
  for (const auto& a : prog.constraints()) p.atoms.push_back(compile(a));
  // Denominators of quad-over-lin atoms must stay positive.
  for (const auto& a : prog.constraints()) {
    if (a.denominator) p.atoms.push_back(compile(Atom::affine(-1.0 * *a.denominator)));
  }
  return p;
}

}  // namespace

KktResiduals kkt_residuals(const ConvexProgram& prog, const rvec& x, const rvec& duals) {
  const auto& atoms = prog.constraints();
  if (static_cast<std::size_t>(duals.size()) != atoms.size()) {
    throw InvalidParams("dual vector size does not match the constraint count");
  }
  KktResiduals r;
  rvec grad = rvec::Zero(prog.num_variables());
  const auto& obj = prog.objective();
  for (std::size_t j = 0; j < obj.idx.size(); ++j) grad[obj.idx[j]] -= obj.coef[j];
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!atoms[j].in_domain(x)) {
      throw DomainError("point is outside the domain of constraint `" + atoms[j].name + "`");
    }
    const double f = atoms[j].value(x);
    const double lam = duals[static_cast<Eigen::Index>(j)];
    grad += lam * atoms[j].gradient(x).head(prog.num_variables());
    r.primal_feasibility = std::max(r.primal_feasibility, f);
    r.complementary_slackness = std::max(r.complementary_slackness, std::abs(lam * f));
    r.dual_feasibility = std::max(r.dual_feasibility, -lam);
  }
  r.stationarity = grad.size() ? grad.lpNorm<Eigen::Infinity>() : 0.0;
  return r;
}

namespace {

SolverResult solve_normalized(const ConvexProgram& prog, const std::optional<rvec>& warm_start,
                              const SolverOptions& o) {
  SolverResult res;
  const Problem p = build_problem(prog);
  rvec x = warm_start ? *warm_start : rvec::Zero(p.n);
  if (x.size() != p.n) throw InvalidParams("warm start has the wrong dimension");
  int used = 0;

  std::vector<double> f;
  const auto in_domain = [&](const rvec& z) {
    for (const auto& a : prog.constraints()) {
      if (!a.in_domain(z)) return false;
    }
    return true;
  };
  if (!in_domain(x)) {
    // Phase 0: push every denominator and log argument above zero,
    // maximize s subject to s <= arg_j(x) and s <= 1.
    Problem q;
    q.n = p.n + 1;
    const AffineForm s = AffineForm::var(p.n);
    double lowest = INFINITY;
    auto add_arg = [&](const AffineForm& arg) {
      q.atoms.push_back(compile(Atom::affine(s + -1.0 * arg)));
      lowest = std::min(lowest, arg.eval(x));
    };
    for (const auto& a : prog.constraints()) {
      if (a.denominator) add_arg(*a.denominator);
      for (const auto& lt : a.logs) add_arg(lt.arg);
    }
    q.atoms.push_back(compile(Atom::affine(s + AffineForm(-1.0))));
    {
      const double radius = 1e3 * (1.0 + x.lpNorm<Eigen::Infinity>());
      std::vector<AffineForm> sq;
      for (int j = 0; j < p.n; ++j) sq.push_back(AffineForm::var(j) + AffineForm(-x[j]));
      q.atoms.push_back(compile(Atom::convex_quadratic(std::move(sq), AffineForm(-radius * radius))));
    }
    q.c = rvec::Zero(q.n);
    q.c[p.n] = 1.0;
    rvec xs(q.n);
    xs << x, std::min(lowest, 0.0) - 1.0;
    const auto inside = [&](const rvec& z) { return z[p.n] > 0.0; };
    const PathOutcome ph = follow_path(q, xs, o, used, o.max_iterations, res.merit, inside);
    x = ph.x.head(p.n);
    if (!in_domain(x)) {
      res.x = x;
      res.iterations = used;
      res.status = ph.status == SolverStatus::optimal ? SolverStatus::infeasible : ph.status;
      res.message = "no point inside the domain of the log and ratio atoms";
      return res;
    }
  }

  for (const auto& a : p.atoms) {
    double v = 0.0;
    if (!eval(a, gather(a, x), v, nullptr, nullptr)) {
      res.status = SolverStatus::numerical_failure;
      res.message = "start point is outside the domain of a log or ratio atom";
      res.x = x;
      return res;
    }
  }

  if (!values(p, x, f)) {
    // Phase I: maximize -s subject to f_j(x) - s <= 0 and s >= -1.
    Problem q;
    q.n = p.n + 1;
    for (const auto& a : prog.constraints()) q.atoms.push_back(compile(a, p.n));
    for (const auto& a : prog.constraints()) {
      if (a.denominator) q.atoms.push_back(compile(Atom::affine(-1.0 * *a.denominator), p.n));
    }
    q.atoms.push_back(compile(Atom::affine(AffineForm::var(p.n, -1.0) + AffineForm(-1.0))));
    // Ball around the start keeps the phase I barrier bounded below when the
    // feasible set is unbounded.
    {
      const double radius = 1e3 * (1.0 + x.lpNorm<Eigen::Infinity>());
      std::vector<AffineForm> sq;
      for (int j = 0; j < p.n; ++j) sq.push_back(AffineForm::var(j) + AffineForm(-x[j]));
      q.atoms.push_back(compile(Atom::convex_quadratic(std::move(sq), AffineForm(-radius * radius))));
    }
    q.c = rvec::Zero(q.n);
    q.c[p.n] = -1.0;
    double worst = 0.0;
    for (const auto& a : p.atoms) {
      double v = 0.0;
      eval(a, gather(a, x), v, nullptr, nullptr);
      worst = std::max(worst, v);
    }
    rvec xs(q.n);
    xs << x, worst + 1.0;
    const auto feasible_now = [&](const rvec& z) { return z[p.n] < 0.0; };
    const PathOutcome ph =
        follow_path(q, xs, o, used, o.max_iterations, res.merit, feasible_now);
    res.phase1_iterations = used;
    x = ph.x.head(p.n);
    if (!values(p, x, f)) {
      res.x = x;
      res.iterations = used;
      if (ph.status == SolverStatus::optimal) {
        res.status = SolverStatus::infeasible;
        res.message = "phase I found no strictly feasible point";
      } else {
        res.status = ph.status;
        res.message = "phase I: " + ph.message;
      }
      return res;
    }
  }

  PathOutcome out = follow_path(p, x, o, used, o.max_iterations, res.merit, {});
  x = std::move(out.x);

  const auto m_user = prog.constraints().size();
  // Plain barrier duals 1 / (t (-f)), or with the first-order correction
  // from one more Newton step at the same t, whichever has the smaller
  // KKT residual.
  auto duals_at = [&](double t) {
    values(p, x, f);
    rvec lam(static_cast<Eigen::Index>(m_user));
    for (std::size_t j = 0; j < m_user; ++j) lam[j] = 1.0 / (t * (-f[j]));
    if (p.atoms.empty()) return lam;
    rvec g;
    rmat H;
    rvec dx;
    barrier_derivatives(p, x, g, H);
    g.noalias() -= t * p.c;
    if (!newton_direction(H, g, o.regularization, dx)) return lam;
    rvec corrected(lam.size());
    rvec gl;
    for (std::size_t j = 0; j < m_user; ++j) {
      const auto& a = p.atoms[j];
      double v = 0.0;
      eval(a, gather(a, x), v, &gl, nullptr);
      double d = 0.0;
      for (std::size_t r = 0; r < a.support.size(); ++r) d += gl[r] * dx[a.support[r]];
      corrected[j] = std::max(0.0, lam[j] * (1.0 + d / (-f[j])));
    }
    if (kkt_residuals(prog, x, corrected).max() < kkt_residuals(prog, x, lam).max()) return corrected;
    return lam;
  };

  res.duals = duals_at(out.t);
  double kkt = kkt_residuals(prog, x, res.duals).max();
  if (out.status == SolverStatus::optimal && kkt > o.kkt_tolerance && !p.atoms.empty()) {
    int extra = 0;
    const int stage = res.merit.empty() ? 0 : res.merit.back().stage + 1;
    const Centering c = center(p, x, out.t, 0.0, o, extra, o.polish_steps, stage, res.merit, {});
    used += extra;
    if (c == Centering::failed) out.status = SolverStatus::numerical_failure;
    res.duals = duals_at(out.t);
    kkt = kkt_residuals(prog, x, res.duals).max();
  }

  res.x = x;
  res.objective = prog.objective().eval(x);
  res.kkt_residual = kkt;
  res.gap = p.atoms.empty() ? 0.0 : static_cast<double>(p.atoms.size()) / out.t;
  res.iterations = used;
  res.status = out.status;
  res.message = out.message;
  if (res.status == SolverStatus::optimal && kkt > o.kkt_tolerance) {
    res.status = SolverStatus::numerical_failure;
    res.message = "KKT residual " + std::to_string(kkt) + " above tolerance";
  }
  return res;
}

}  // namespace

// The path is followed on the objective divided by its largest
// coefficient, so tolerances do not depend on how the objective is scaled.
SolverResult solve(const ConvexProgram& prog, const std::optional<rvec>& warm_start,
                   const SolverOptions& o) {
  double scale = 0.0;
  {
    rvec c = rvec::Zero(prog.num_variables());
    const auto& obj = prog.objective();
    for (std::size_t j = 0; j < obj.idx.size(); ++j) {
      if (obj.idx[j] >= 0 && obj.idx[j] < c.size()) c[obj.idx[j]] += obj.coef[j];
    }
    scale = c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0;
  }
  if (!(scale > 0.0) || scale == 1.0 || !std::isfinite(scale)) return solve_normalized(prog, warm_start, o);
  ConvexProgram scaled = prog;
  AffineForm obj = prog.objective();
  obj *= 1.0 / scale;
  scaled.set_objective(std::move(obj));
  SolverResult r = solve_normalized(scaled, warm_start, o);
  r.objective = prog.objective().eval(r.x);
  r.duals *= scale;
  r.gap *= scale;
  return r;
}

double gradcheck(const Atom& atom, const rvec& x, double step) {
  const Eigen::Index n = x.size();
  const rvec g = atom.gradient(x).head(n);
  const rmat H = atom.hessian(x).topLeftCorner(n, n);
  double err = 0.0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
  for (Eigen::Index j = 0; j < n; ++j) {
    rvec xp = x;
    rvec xm = x;
    xp[j] += step;
    xm[j] -= step;
    const double fd = (atom.value(xp) - atom.value(xm)) / (2.0 * step);
    err = std::max(err, rel(g[j], fd));
    const rvec col = (atom.gradient(xp).head(n) - atom.gradient(xm).head(n)) / (2.0 * step);
    for (Eigen::Index r = 0; r < n; ++r) err = std::max(err, rel(H(r, j), col[r]));
  }
  return err;
}

}  // namespace fran::cvx
