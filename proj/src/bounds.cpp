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

#include "fran/bounds.hpp"

#include <cmath>

#include "fran/metrics.hpp"

namespace fran {

double TangentBound::operator()(const cvec& v, double s) const {
  return lin.dot(v).real() - slope * s;
}

cvx::AffineForm TangentBound::form(int v_first, int s_index) const {
  cvx::AffineForm a;
  const auto n = static_cast<int>(lin.size());
  for (int j = 0; j < n; ++j) {
    // Re(conj(l) v) = Re l Re v + Im l Im v
    if (lin[j].real() != 0.0) a.add(v_first + j, lin[j].real());
    if (lin[j].imag() != 0.0) a.add(v_first + n + j, lin[j].imag());
  }
  if (slope != 0.0) a.add(s_index, -slope);
  return a;
}

TangentBound tangent_bound(const cvec& v_exp, double s_exp, const cvec& h, double c) {
  if (!(s_exp > 0.0)) throw DomainError("tangent bound needs a positive expansion denominator");
  const cvec hc = c * h;
  const cplx z = hc.dot(v_exp);  // h^H v_exp
  TangentBound b;
  b.lin = (2.0 / s_exp) * (hc * z);
  b.slope = std::norm(z) / (s_exp * s_exp);
  return b;
}

std::pair<cvx::AffineForm, cvx::AffineForm> inner_product_forms(const cvec& h, int v_first) {
  cvx::AffineForm re;
  cvx::AffineForm im;
  const auto n = static_cast<int>(h.size());
  for (int j = 0; j < n; ++j) {
    const double hr = h[j].real();
    const double hi = h[j].imag();
    // conj(h) v = (hr Re v + hi Im v) + i (hr Im v - hi Re v)
    if (hr != 0.0) {
      re.add(v_first + j, hr);
      im.add(v_first + n + j, hr);
    }
    if (hi != 0.0) {
      re.add(v_first + n + j, hi);
      im.add(v_first + j, -hi);
    }
  }
  return {std::move(re), std::move(im)};
}

void write_complex(rvec& x, int first, const cvec& v) {
  const auto n = v.size();
  x.segment(first, n) = v.real();
  x.segment(first + n, n) = v.imag();
}

cvec read_complex(const rvec& x, int first, Eigen::Index n) {
  cvec v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = cplx(x[first + j], x[first + n + j]);
  return v;
}

double logdet_upper(const cmat& a, const cmat& b) {
  Eigen::LLT<cmat> llt(b);
  if (llt.info() != Eigen::Success) throw DomainError("expansion matrix is not positive definite");
  const cmat diff = a - b;
  const double trace = llt.solve(diff).trace().real();
  return log2_det(b) + trace / kLn2;
}

}  // namespace fran
