#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "arealaw/errors.hpp"

namespace arealaw {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct HermitianEigen {
  RVector values; // ascending
  CMatrix vectors;
};

namespace linalg {

bool is_real(const CMatrix& a, double tol = 0.0);

// LAPACK divide-and-conquer. Uses the real symmetric driver when the
// imaginary part vanishes. Only the lower triangle is read.
HermitianEigen eigh(const CMatrix& a);
RVector eigvalsh(const CMatrix& a);

CMatrix multiply(const CMatrix& a, const CMatrix& b);
CMatrix adjoint_multiply(const CMatrix& a, const CMatrix& b); // a^dagger b
CMatrix multiply_adjoint(const CMatrix& a, const CMatrix& b); // a b^dagger

CMatrix hermitian_part(const CMatrix& a);
double hermitian_deviation(const CMatrix& a); // ||a - a^dagger|| / 2

// Largest singular value. Dense SVD for small matrices, Lanczos otherwise.
double operator_norm(const CMatrix& a);
double hermitian_norm(const CMatrix& a);
double trace_norm_hermitian(const CMatrix& a);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix identity(Index n);

CMatrix apply_function(const HermitianEigen& e, const std::function<double(double)>& f);

using LinearMap = std::function<CVector(const CVector&)>;

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of a linear map from its action and adjoint action,
// via Lanczos with full reorthogonalization on A^dagger A.
NormEstimate spectral_norm(const LinearMap& apply, const LinearMap& apply_adjoint, Index dim,
                           int max_iterations = 400, double rel_tol = 1e-10);

// Extremal eigenpairs of a Hermitian map by Lanczos with full
// reorthogonalization. Returns the `count` lowest.
struct LanczosResult {
  RVector values;
  CMatrix vectors;
  int iterations = 0;
  bool converged = false;
};
LanczosResult lanczos_lowest(const LinearMap& apply, Index dim, int count, int max_iterations,
                             double tol, unsigned seed = 7);

} // namespace linalg
} // namespace arealaw
