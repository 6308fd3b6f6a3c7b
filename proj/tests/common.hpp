#pragma once

#include <cmath>
#include <random>

#include "arealaw/lattice_model.hpp"
#include "arealaw/spectral.hpp"

namespace arealaw::testing {

inline Hamiltonian1D tfim(int n, double h) { return build_model("transverse_ising", n, {{"h", h}}); }

inline CVector ghz(int n) {
  CVector v = CVector::Zero(Index(1) << n);
  v(0) = v(v.size() - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

inline CVector product_state(int n, int d = 2) {
  CVector v = CVector::Zero(ipow(d, n));
  v(0) = 1.0;
  return v;
}

inline CMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(g(rng), g(rng));
  return m;
}

inline CVector random_state(Index dim, std::mt19937_64& rng) {
  CVector v = random_matrix(dim, 1, rng);
  return v / v.norm();
}

} // namespace arealaw::testing
