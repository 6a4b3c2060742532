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

// Small convex programs with known optima.

#include <cmath>
#include <string>
#include <vector>

#include "fran/bounds.hpp"
#include "fran/cvxkit.hpp"

namespace fran::testing {

struct CorpusCase {
  std::string name;
  cvx::ConvexProgram program;
  double optimum = 0.0;
};

inline std::vector<CorpusCase> solver_corpus() {
  using cvx::AffineForm;
  using cvx::Atom;
  using cvx::ConvexProgram;
  std::vector<CorpusCase> out;
  auto v = [](int i, double c = 1.0) { return AffineForm::var(i, c); };

  {  // t <= log2(1 + s), s <= 3
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0));
    p.add_constraint(Atom::log_hypograph(v(0), v(1)));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-3.0)));
    out.push_back({"log hypograph", std::move(p), 2.0});
  }
  {  // a.x over the ball |x|^2 <= P
    ConvexProgram p;
    p.add_variables(3);
    p.set_objective(v(0, 1.0) + v(1, 2.0) + v(2, 2.0));
    p.add_constraint(Atom::convex_quadratic({v(0), v(1), v(2)}, AffineForm(-4.0)));
    out.push_back({"ball", std::move(p), 6.0});
  }
  {  // Re(h^H g) over |g|^2 <= P with complex h
    const double pw = 2.5;
    cvec h(3);
    h << cplx(1.0, -0.5), cplx(0.3, 2.0), cplx(-1.2, 0.1);
    ConvexProgram p;
    p.add_variables(6);
    auto [re, im] = inner_product_forms(h, 0);
    p.set_objective(re);
    std::vector<AffineForm> sq;
    for (int j = 0; j < 6; ++j) sq.push_back(v(j));
    p.add_constraint(Atom::convex_quadratic(std::move(sq), AffineForm(-pw)));
    out.push_back({"matched filter", std::move(p), std::sqrt(pw) * h.norm()});
  }
  {  // single-user rate with the file cap binding: r <= log2(1+s), s <= P|h|^2/sigma^2, tau r <= S
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0));
    p.add_constraint(Atom::log_hypograph(v(0), v(1)));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-100.0 * 1.7)));
    p.add_constraint(Atom::affine(v(0, 0.5) + AffineForm(-2.0)));
    out.push_back({"file cap", std::move(p), 4.0});
  }
  {  // same with the channel binding
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0));
    p.add_constraint(Atom::log_hypograph(v(0), v(1)));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-15.0)));
    p.add_constraint(Atom::affine(v(0, 0.5) + AffineForm(-10.0)));
    out.push_back({"channel cap", std::move(p), 4.0});
  }
  {  // LP
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0) + v(1));
    p.add_constraint(Atom::affine(v(0) + AffineForm(-1.0)));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-2.0)));
    p.add_constraint(Atom::affine(v(0) + v(1) + AffineForm(-2.5)));
    p.add_constraint(Atom::affine(v(0, -1.0)));
    p.add_constraint(Atom::affine(v(1, -1.0)));
    out.push_back({"lp", std::move(p), 2.5});
  }
  {  // x^2 <= y z, y <= 2, z <= 8
    ConvexProgram p;
    p.add_variables(3);
    p.set_objective(v(0));
    p.add_constraint(Atom::quad_over_lin({v(0)}, v(1), v(2)));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-2.0)));
    p.add_constraint(Atom::affine(v(2) + AffineForm(-8.0)));
    out.push_back({"rotated cone", std::move(p), 4.0});
  }
  {  // x1^2 + x2^2 <= y z, y <= 1, z <= 2
    ConvexProgram p;
    p.add_variables(4);
    p.set_objective(v(0) + v(1));
    p.add_constraint(Atom::quad_over_lin({v(0), v(1)}, v(2), v(3)));
    p.add_constraint(Atom::affine(v(2) + AffineForm(-1.0)));
    p.add_constraint(Atom::affine(v(3) + AffineForm(-2.0)));
    out.push_back({"rotated cone 2d", std::move(p), 2.0});
  }
  {  // x <= log2(y), y <= 8
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0));
    p.add_constraint(Atom::neg_log({}, v(0), {{1.0, v(1)}}));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-8.0)));
    out.push_back({"neg log", std::move(p), 3.0});
  }
  {  // x^2 <= log2(w), w <= 16
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0));
    p.add_constraint(Atom::neg_log({v(0)}, AffineForm(), {{1.0, v(1)}}));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-16.0)));
    out.push_back({"neg log quadratic", std::move(p), 2.0});
  }
  {  // shifted disc (x1 - 1)^2 + (x2 - 2)^2 <= 1
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0) + v(1));
    p.add_constraint(
        Atom::convex_quadratic({v(0) + AffineForm(-1.0), v(1) + AffineForm(-2.0)}, AffineForm(-1.0)));
    out.push_back({"shifted disc", std::move(p), 3.0 + std::sqrt(2.0)});
  }
  {  // water filling over noise levels (1, 2) with total power 3
    ConvexProgram p;
    p.add_variables(4);  // r1, r2, p1, p2
    p.set_objective(v(0) + v(1));
    p.add_constraint(Atom::log_hypograph(v(0), v(2)));
    p.add_constraint(Atom::log_hypograph(v(1), v(3, 0.5)));
    p.add_constraint(Atom::affine(v(2) + v(3) + AffineForm(-3.0)));
    p.add_constraint(Atom::affine(v(2, -1.0)));
    p.add_constraint(Atom::affine(v(3, -1.0)));
    out.push_back({"water filling", std::move(p), std::log2(4.5)});
  }
  {  // rate cap binds before the power: t <= log2(1 + s), s <= 100, t <= 3
    ConvexProgram p;
    p.add_variables(2);
    p.set_objective(v(0));
    p.add_constraint(Atom::log_hypograph(v(0), v(1)));
    p.add_constraint(Atom::affine(v(1) + AffineForm(-100.0)));
    p.add_constraint(Atom::affine(v(0) + AffineForm(-3.0)));
    out.push_back({"log cap", std::move(p), 3.0});
  }
  return out;
}

}  // namespace fran::testing
