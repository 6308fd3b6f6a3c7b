#pragma once

#include "arealaw/linalg.hpp"

// Data-parallel kernels over the tensor-product layout. A chain index is
// split as (left, mid, right) with flat index (l * mid + m) * right + r, so
// site 1 is the most significant digit.
//
// Each kernel has an OpenMP version and a serial version in `reference`.
// Parallel loops run over independent output columns; nothing is reduced
// across threads, so results do not depend on the thread count.

namespace arealaw::kernels {

struct Split {
  Index left = 1;
  Index mid = 1;
  Index right = 1;
  Index total() const { return left * mid * right; }
};

// out(m, m') = sum_{l,r} op((l,m,r), (l,m',r))
CMatrix partial_trace(const CMatrix& op, const Split& s);

// target += scale * (I_left (x) local (x) I_right)
void embed_add(CMatrix& target, const CMatrix& local, const Split& s, Complex scale = 1.0);

// w = (I (x) local (x) I) v
CVector apply_local(const CMatrix& local, const Split& s, const CVector& v);

// Same, applied to every column of x in place.
void apply_local_columns(const CMatrix& local, const Split& s, CMatrix& x);

// rho(m, m') = sum_{l,r} psi(l,m,r) conj(psi(l,m',r))
CMatrix reduced_density(const CVector& psi, const Split& s);

// c(m, n) *= exp(-q (row[m] - col[n])^2 / (2 gap^2))
void gaussian_hadamard(CMatrix& c, const RVector& row, const RVector& col, double q, double gap);

namespace reference {
CMatrix partial_trace(const CMatrix& op, const Split& s);
void embed_add(CMatrix& target, const CMatrix& local, const Split& s, Complex scale = 1.0);
CVector apply_local(const CMatrix& local, const Split& s, const CVector& v);
void apply_local_columns(const CMatrix& local, const Split& s, CMatrix& x);
CMatrix reduced_density(const CVector& psi, const Split& s);
void gaussian_hadamard(CMatrix& c, const RVector& row, const RVector& col, double q, double gap);
} // namespace reference

} // namespace arealaw::kernels
