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

#include <utility>

#include "fran/common.hpp"
#include "fran/cvxkit.hpp"

namespace fran {

// First-order lower bound of |h^H v|^2 / s around (v_exp, s_exp):
//   value(v, s) = 2 Re(v_exp^H h h^H v) / s_exp - (|h^H v_exp| / s_exp)^2 * s
// Affine in (v, s) and tight at the expansion point.
struct TangentBound {
  cvec lin;            // 2 h h^H v_exp / s_exp, so the first term is Re(lin^H v)
  double slope = 0.0;  // (|h^H v_exp| / s_exp)^2

  double operator()(const cvec& v, double s) const;
  // v realified as [Re v; Im v] starting at v_first.
  cvx::AffineForm form(int v_first, int s_index) const;
};

// c gates the channel (c = 0 gives the zero bound). Throws DomainError if
// s_exp <= 0.
TangentBound tangent_bound(const cvec& v_exp, double s_exp, const cvec& h, double c = 1.0);

// Real and imaginary parts of h^H v as affine forms of realified v.
std::pair<cvx::AffineForm, cvx::AffineForm> inner_product_forms(const cvec& h, int v_first);

void write_complex(rvec& x, int first, const cvec& v);
cvec read_complex(const rvec& x, int first, Eigen::Index n);

// log2 det(B) + tr(B^-1 (A - B)) / ln 2. Throws DomainError if B is not
// Hermitian positive definite.
double logdet_upper(const cmat& a, const cmat& b);

}  // namespace fran
