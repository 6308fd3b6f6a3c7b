#pragma once

#include <string>

#include "arealaw/kernels.hpp"

namespace arealaw {

// Closed interval of sites [first, last], 1-based.
struct Interval {
  int first = 1;
  int last = 1;

  int length() const { return last - first + 1; }
  bool contains(int site) const { return site >= first && site <= last; }
  bool contains(const Interval& other) const { return other.first >= first && other.last <= last; }
  bool operator==(const Interval&) const = default;
  std::string str() const;
};

void validate_interval(const Interval& x, int n_sites);
Interval clip(const Interval& x, int n_sites);
// min |i - j| over i in x, j in y; 0 when they overlap.
int distance(const Interval& x, const Interval& y);

Index ipow(Index base, int exp);
kernels::Split split_for(const Interval& x, int n_sites, int local_dim);

// Operator acting on an interval of an n-site chain, stored on the interval only.
struct LocalOperator {
  int n_sites = 1;
  int local_dim = 2;
  Interval support;
  CMatrix matrix;

  LocalOperator() = default;
  LocalOperator(int n, int d, Interval x, CMatrix m);

  static LocalOperator identity(int n, int d, Interval x);

  Index dimension() const { return ipow(local_dim, n_sites); }
  CMatrix dense() const;
  void add_to(CMatrix& target, Complex scale = 1.0) const;
  CVector apply(const CVector& v) const;
  LocalOperator adjoint() const;
  LocalOperator extended(const Interval& larger) const;
  double norm() const;
};

// Normalized partial trace onto `x`: tr_{x^c}(A) / dim(x^c).
LocalOperator conditional_expectation(const CMatrix& full, int n_sites, int local_dim, const Interval& x);
LocalOperator conditional_expectation(const LocalOperator& a, const Interval& x);

LocalOperator product(const LocalOperator& a, const LocalOperator& b);
LocalOperator sum(const LocalOperator& a, const LocalOperator& b, Complex scale_b = 1.0);

namespace pauli {
CMatrix x();
CMatrix y();
CMatrix z();
} // namespace pauli

} // namespace arealaw
