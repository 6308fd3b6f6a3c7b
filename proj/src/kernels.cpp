#include "arealaw/kernels.hpp"

#include <cmath>

namespace arealaw::kernels {

namespace {

inline Index flat(const Split& s, Index l, Index m, Index r) { return (l * s.mid + m) * s.right + r; }

void check_square(const CMatrix& a, Index n, const char* what) {
  if (a.rows() != n || a.cols() != n) throw ConfigError(std::string(what) + ": dimension mismatch");
}

} // namespace

CMatrix partial_trace(const CMatrix& op, const Split& s) {
  check_square(op, s.total(), "partial_trace");
  CMatrix out = CMatrix::Zero(s.mid, s.mid);
#pragma omp parallel for schedule(static)
  for (Index mp = 0; mp < s.mid; ++mp) {
    for (Index l = 0; l < s.left; ++l) {
      for (Index r = 0; r < s.right; ++r) {
        const Complex* col = op.data() + flat(s, l, mp, r) * op.rows();
        const Complex* base = col + flat(s, l, 0, r);
        for (Index m = 0; m < s.mid; ++m) out(m, mp) += base[m * s.right];
      }
    }
  }
  return out;
}

void embed_add(CMatrix& target, const CMatrix& local, const Split& s, Complex scale) {
  check_square(target, s.total(), "embed_add");
  check_square(local, s.mid, "embed_add");
  const Index n = s.total();
#pragma omp parallel for schedule(static)
  for (Index col = 0; col < n; ++col) {
    const Index r = col % s.right;
    const Index mp = (col / s.right) % s.mid;
    const Index l = col / (s.right * s.mid);
    Complex* dst = target.data() + col * n + flat(s, l, 0, r);
    for (Index m = 0; m < s.mid; ++m) dst[m * s.right] += scale * local(m, mp);
  }
}

CVector apply_local(const CMatrix& local, const Split& s, const CVector& v) {
  check_square(local, s.mid, "apply_local");
  if (v.size() != s.total()) throw ConfigError("apply_local: vector dimension mismatch");
  CVector w(v.size());
  const Index block = s.mid * s.right;
  CMatrix lt = local.transpose();
#pragma omp parallel for schedule(static)
  for (Index l = 0; l < s.left; ++l) {
    Eigen::Map<const CMatrix> x(v.data() + l * block, s.right, s.mid);
    Eigen::Map<CMatrix> y(w.data() + l * block, s.right, s.mid);
    y.noalias() = x * lt;
  }
  return w;
}

void apply_local_columns(const CMatrix& local, const Split& s, CMatrix& x) {
  check_square(local, s.mid, "apply_local_columns");
  if (x.rows() != s.total()) throw ConfigError("apply_local_columns: dimension mismatch");
  const Index block = s.mid * s.right;
  CMatrix lt = local.transpose();
#pragma omp parallel
  {
    CMatrix tmp(s.right, s.mid);
#pragma omp for schedule(static)
    for (Index c = 0; c < x.cols(); ++c) {
      for (Index l = 0; l < s.left; ++l) {
        Eigen::Map<CMatrix> xb(x.col(c).data() + l * block, s.right, s.mid);
        tmp.noalias() = xb * lt;
        xb = tmp;
      }
    }
  }
}

CMatrix reduced_density(const CVector& psi, const Split& s) {
  if (psi.size() != s.total()) throw ConfigError("reduced_density: dimension mismatch");
  CMatrix out = CMatrix::Zero(s.mid, s.mid);
  const Index block = s.mid * s.right;
#pragma omp parallel for schedule(static)
  for (Index mp = 0; mp < s.mid; ++mp) {
    for (Index m = 0; m < s.mid; ++m) {
      Complex acc = 0.0;
      for (Index l = 0; l < s.left; ++l) {
        const Complex* a = psi.data() + l * block + m * s.right;
        const Complex* b = psi.data() + l * block + mp * s.right;
        for (Index r = 0; r < s.right; ++r) acc += a[r] * std::conj(b[r]);
      }
      out(m, mp) = acc;
    }
  }
  return out;
}

void gaussian_hadamard(CMatrix& c, const RVector& row, const RVector& col, double q, double gap) {
  if (c.rows() != row.size() || c.cols() != col.size())
    throw ConfigError("gaussian_hadamard: dimension mismatch");
  const double k = q / (2.0 * gap * gap);
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < c.cols(); ++n) {
    for (Index m = 0; m < c.rows(); ++m) {
      const double d = row(m) - col(n);
      c(m, n) *= std::exp(-k * d * d);
    }
  }
}

namespace reference {

CMatrix partial_trace(const CMatrix& op, const Split& s) {
  check_square(op, s.total(), "partial_trace");
  CMatrix out = CMatrix::Zero(s.mid, s.mid);
  for (Index m = 0; m < s.mid; ++m)
    for (Index mp = 0; mp < s.mid; ++mp)
      for (Index l = 0; l < s.left; ++l)
        for (Index r = 0; r < s.right; ++r) out(m, mp) += op(flat(s, l, m, r), flat(s, l, mp, r));
  return out;
}

void embed_add(CMatrix& target, const CMatrix& local, const Split& s, Complex scale) {
  check_square(target, s.total(), "embed_add");
  check_square(local, s.mid, "embed_add");
  for (Index l = 0; l < s.left; ++l)
    for (Index r = 0; r < s.right; ++r)
      for (Index m = 0; m < s.mid; ++m)
        for (Index mp = 0; mp < s.mid; ++mp)
          target(flat(s, l, m, r), flat(s, l, mp, r)) += scale * local(m, mp);
}

CVector apply_local(const CMatrix& local, const Split& s, const CVector& v) {
  check_square(local, s.mid, "apply_local");
  CVector w = CVector::Zero(v.size());
  for (Index l = 0; l < s.left; ++l)
    for (Index r = 0; r < s.right; ++r)
      for (Index m = 0; m < s.mid; ++m)
        for (Index mp = 0; mp < s.mid; ++mp) w(flat(s, l, m, r)) += local(m, mp) * v(flat(s, l, mp, r));
  return w;
}

void apply_local_columns(const CMatrix& local, const Split& s, CMatrix& x) {
  for (Index c = 0; c < x.cols(); ++c) {
    CVector col = x.col(c);
    x.col(c) = reference::apply_local(local, s, col);
  }
}

CMatrix reduced_density(const CVector& psi, const Split& s) {
  CMatrix out = CMatrix::Zero(s.mid, s.mid);
  for (Index l = 0; l < s.left; ++l)
    for (Index r = 0; r < s.right; ++r)
      for (Index m = 0; m < s.mid; ++m)
        for (Index mp = 0; mp < s.mid; ++mp)
          out(m, mp) += psi(flat(s, l, m, r)) * std::conj(psi(flat(s, l, mp, r)));
  return out;
}

void gaussian_hadamard(CMatrix& c, const RVector& row, const RVector& col, double q, double gap) {
  for (Index m = 0; m < c.rows(); ++m)
    for (Index n = 0; n < c.cols(); ++n) {
      const double d = row(m) - col(n);
      c(m, n) *= std::exp(-q * d * d / (2.0 * gap * gap));
    }
}

} // namespace reference
} // namespace arealaw::kernels
