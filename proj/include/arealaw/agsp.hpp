#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "arealaw/spectral.hpp"

namespace arealaw {

// Region bookkeeping for a cut j and half-width l. Offsets r1 ~ l/3 and
// r2 ~ 2l/3 are rounded to the nearest site, at least 1. Regions are
// clipped to the chain.
struct AgspLayout {
  int n_sites = 0;
  int j = 0;
  int l = 0;
  int r1 = 1;
  int r2 = 1;
  std::vector<int> left_bonds, middle_bonds, right_bonds;
  Interval left_half, right_half;            // supports of O_L, O_R
  Interval left_region, middle_region, right_region; // truncation regions
  Interval window;                           // support of O_B
};

AgspLayout agsp_layout(int n_sites, int j, int l);

struct BondGroup {
  std::vector<int> bonds;
  double shift = 0.0; // <Psi0|sum of bonds|Psi0>
};

struct SplitHamiltonian {
  AgspLayout layout;
  BondGroup left, middle, right;
};

SplitHamiltonian split_hamiltonian(const Hamiltonian1D& h, const CVector& ground_state, int j, int l);

// sum of the group's bonds minus shift, as an operator on `support`.
LocalOperator group_operator(const Hamiltonian1D& h, const BondGroup& g, const Interval& support);
// (sum of bonds - shift) X for a full-chain matrix X.
CMatrix group_times(const Hamiltonian1D& h, const BondGroup& g, const CMatrix& x);

double filter_parameter(int l, double gap, double v); // (l/3) gap / (2 v)

struct TruncatedPieces {
  LocalOperator m_left;   // on [1, j]
  LocalOperator m_middle; // on the middle region
  LocalOperator m_right;  // on [j+1, N]
  double q = 0.0;
  double left_residual = 0.0; // ||M_X Psi0||
  double middle_residual = 0.0;
  double right_residual = 0.0;
  // ||M_X - filtered H_X||, filled when requested
  std::optional<double> left_truncation_error, middle_truncation_error, right_truncation_error;
};

struct PieceOptions {
  bool measure_truncation_error = false;
};

TruncatedPieces build_truncated_pieces(const SpectralData& sd, const Hamiltonian1D& h,
                                       const SplitHamiltonian& split, double v, const PieceOptions& opts = {});

struct SideProjectors {
  LocalOperator o_left, o_right;
  HermitianEigen left_eigen, right_eigen; // of the Hermitized M_L, M_R
  double threshold = 0.0;
  double left_hermitian_deviation = 0.0;
  double right_hermitian_deviation = 0.0;
  double left_defect = 0.0; // ||(O_L - 1) Psi0||
  double right_defect = 0.0;
};

double side_threshold(double gap, double j_bound, int l, double xi);

SideProjectors build_side_projectors(const LocalOperator& m_left, const LocalOperator& m_right, double threshold,
                                     const CVector& ground_state);

enum class PropagatorMethod { spectral, ode };

struct BondOperatorOptions {
  PropagatorMethod method = PropagatorMethod::spectral;
  int quadrature_nodes = 64;
  double ode_tolerance = 1e-12;
  double unitarity_drift_per_time = 1e-9;
};

struct BondOperator {
  LocalOperator o_b;
  double p_b_norm = 0.0;
  double scale = 1.0; // rescaling applied to bring ||O_B|| to 1
  double max_unitarity_drift = 0.0;
};

// P_B = gaussian average of U(t) = T exp(i int_0^t M_B^int), with
// M_B^int(t) = e^{i K0 t} M_B e^{-i K0 t}, K0 = M_L + M_R. O_B is its
// conditional expectation onto the window.
CMatrix build_p_b(double gap, const SideProjectors& sides, const TruncatedPieces& pieces,
                  const BondOperatorOptions& opts, double* drift = nullptr);
BondOperator build_o_b(double gap, const SideProjectors& sides, const TruncatedPieces& pieces,
                       const AgspLayout& layout, const BondOperatorOptions& opts = {});

struct PositivizationReport {
  double epsilon = 0.0;  // ||B Q - P||
  double measured = 0.0; // ||B^dagger B Q - P||
  double bound = 0.0;    // sqrt(1 - (1-eps)^2) + 3 eps + eps^2
  double scale = 1.0;
  bool holds = false;
};

double positivization_bound(double epsilon);

struct Positivized {
  CMatrix b_plus;
  PositivizationReport report;
};

Positivized positivize(const CMatrix& b, const CMatrix& q, const CMatrix& p);

struct AGSPTriple {
  int j = 0;
  int l = 0;
  double q = 0.0;
  LocalOperator o_left, o_right, o_b, o_b_plus;
  double epsilon = 0.0;
  double epsilon_plus = 0.0;
  double o_b_expectation = 0.0;  // Re <Psi0|O_B|Psi0>
  double q_expectation = 0.0;    // <Psi0|O_L O_R|Psi0>
  double o_b_norm = 0.0;
  double o_b_plus_norm = 0.0;
  double o_b_scale = 1.0;
  PositivizationReport positivization;
  bool expectation_chain_holds = false; // both expectations >= 1 - 2 eps
};

AGSPTriple assemble_and_measure(const CVector& ground_state, const LocalOperator& o_left,
                                const LocalOperator& o_b, const LocalOperator& o_right, int j, int l, double q);

struct AgspOptions {
  double v = 0.0;  // Lieb-Robinson velocity entering q
  double xi = 0.0; // <= 0: use max(2 v / gap, 1)
  PieceOptions pieces;
  BondOperatorOptions bond;
};

struct AgspResult {
  AGSPTriple triple;
  SplitHamiltonian split;
  TruncatedPieces pieces;
  double threshold = 0.0;
  double left_defect = 0.0;
  double right_defect = 0.0;
  int left_rank = 0; // rank of O_L
  int right_rank = 0;
  double seconds = 0.0;
};

AgspResult build_agsp(const Hamiltonian1D& h, const SpectralData& sd, int j, int l, const AgspOptions& opts);

// Inputs of the overlap / Cauchy-Schwarz / relative-entropy chain at cut j.
struct ChainMeasurement {
  int j = 0;
  int l = 0;
  double p_overlap = 0.0; // tr(P0 rho_{1,j} (x) rho_{j+1,N}) = sum of s^4
  double x = 0.0;         // tr(O_B sigma), sigma = rho_A (x) rho_B on the window halves
  double x_plus = 0.0;    // tr(O_B^dagger O_B sigma)
  double y = 0.0;         // <O_L> <O_R>
  double p_plus = 0.0;    // ||O_B Psi0||^2
  double s_left = 0.0;    // S(rho_A), A = window part left of the cut
  double s_right = 0.0;
  double s_joint = 0.0;   // S(rho_window)
  double epsilon = 0.0;
  double epsilon_plus = 0.0;
  double mutual_information() const { return s_left + s_right - s_joint; }
};

ChainMeasurement measure_chain(const CVector& ground_state, const AGSPTriple& t);

void write_agsp_header(std::ostream& out);
void write_agsp_row(std::ostream& out, const AgspResult& r);

} // namespace arealaw
