#include "arealaw/local_operator.hpp"

#include <algorithm>

namespace arealaw {

std::string Interval::str() const { return "[" + std::to_string(first) + "," + std::to_string(last) + "]"; }

void validate_interval(const Interval& x, int n_sites) {
  if (x.first < 1 || x.last > n_sites || x.first > x.last)
    throw ConfigError("interval " + x.str() + " out of range for " + std::to_string(n_sites) + " sites");
}

Interval clip(const Interval& x, int n_sites) {
  return {std::max(1, x.first), std::min(n_sites, x.last)};
}

int distance(const Interval& x, const Interval& y) {
  if (x.last < y.first) return y.first - x.last;
  if (y.last < x.first) return x.first - y.last;
  return 0;
}

Index ipow(Index base, int exp) {
  Index out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

kernels::Split split_for(const Interval& x, int n_sites, int local_dim) {
  validate_interval(x, n_sites);
  return {ipow(local_dim, x.first - 1), ipow(local_dim, x.length()), ipow(local_dim, n_sites - x.last)};
}

LocalOperator::LocalOperator(int n, int d, Interval x, CMatrix m)
    : n_sites(n), local_dim(d), support(x), matrix(std::move(m)) {
  validate_interval(support, n_sites);
  const Index dim = ipow(local_dim, support.length());
  if (matrix.rows() != dim || matrix.cols() != dim)
    throw ConfigError("local operator on " + support.str() + " needs dimension " + std::to_string(dim));
}

LocalOperator LocalOperator::identity(int n, int d, Interval x) {
  return LocalOperator(n, d, x, linalg::identity(ipow(d, x.length())));
}

CMatrix LocalOperator::dense() const {
  const Index n = dimension();
  CMatrix out = CMatrix::Zero(n, n);
  add_to(out);
  return out;
}

void LocalOperator::add_to(CMatrix& target, Complex scale) const {
  kernels::embed_add(target, matrix, split_for(support, n_sites, local_dim), scale);
}

CVector LocalOperator::apply(const CVector& v) const {
  return kernels::apply_local(matrix, split_for(support, n_sites, local_dim), v);
}

LocalOperator LocalOperator::adjoint() const {
  return LocalOperator(n_sites, local_dim, support, matrix.adjoint());
}

LocalOperator LocalOperator::extended(const Interval& larger) const {
  if (!larger.contains(support)) throw ConfigError("extended: target interval must contain support");
  const Index before = ipow(local_dim, support.first - larger.first);
  const Index after = ipow(local_dim, larger.last - support.last);
  CMatrix m = linalg::kron(linalg::kron(linalg::identity(before), matrix), linalg::identity(after));
  return LocalOperator(n_sites, local_dim, larger, std::move(m));
}

double LocalOperator::norm() const { return linalg::operator_norm(matrix); }

LocalOperator conditional_expectation(const CMatrix& full, int n_sites, int local_dim, const Interval& x) {
  kernels::Split s = split_for(x, n_sites, local_dim);
  CMatrix reduced = kernels::partial_trace(full, s);
  reduced /= static_cast<double>(s.left * s.right);
  return LocalOperator(n_sites, local_dim, x, std::move(reduced));
}

LocalOperator conditional_expectation(const LocalOperator& a, const Interval& x) {
  Interval hull{std::min(a.support.first, x.first), std::max(a.support.last, x.last)};
  LocalOperator big = a.extended(hull);
  // Work on the hull as its own chain, then relabel.
  const int offset = hull.first - 1;
  Interval local_x{x.first - offset, x.last - offset};
  LocalOperator r = conditional_expectation(big.matrix, hull.length(), a.local_dim, local_x);
  return LocalOperator(a.n_sites, a.local_dim, x, std::move(r.matrix));
}

LocalOperator product(const LocalOperator& a, const LocalOperator& b) {
  Interval hull{std::min(a.support.first, b.support.first), std::max(a.support.last, b.support.last)};
  CMatrix m = linalg::multiply(a.extended(hull).matrix, b.extended(hull).matrix);
  return LocalOperator(a.n_sites, a.local_dim, hull, std::move(m));
}

LocalOperator sum(const LocalOperator& a, const LocalOperator& b, Complex scale_b) {
  Interval hull{std::min(a.support.first, b.support.first), std::max(a.support.last, b.support.last)};
  CMatrix m = a.extended(hull).matrix + scale_b * b.extended(hull).matrix;
  return LocalOperator(a.n_sites, a.local_dim, hull, std::move(m));
}

namespace pauli {
CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
CMatrix y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
} // namespace pauli

} // namespace arealaw

#include "arealaw/io.hpp"

#include <cmath>
#include <cstdio>

namespace arealaw::io {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

} // namespace arealaw::io
