#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "ionprobe/errors.hpp"

namespace ionprobe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Density-matrix validity tolerances used across the library.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenvalueFloor = -1e-10;

// Truncated Fock basis |0>..|d-1>. Truncation is always an explicit caller
// decision; nothing in the library resizes silently.
struct FockBasis {
  int dim;
  explicit FockBasis(int d) : dim(d) {
    if (d < 2) throw std::domain_error("FockBasis: dim must be >= 2");
  }
};

// Motional density operator on a truncated Fock basis.
struct MotionalState {
  FockBasis basis;
  Matrix matrix;  // d x d
  int dim() const { return basis.dim; }
};

// Internal probe superposition |±_phi> = (|g> ± e^{i phi}|e>)/sqrt(2),
// identified by its sign token (+1/-1) and phase in [0, 2pi).
struct ProbeState {
  int sign;
  double phase;
  ProbeState(int sign_token, double phi);
};

// Joint internal (x) motional density operator, 2d x 2d, internal-major
// ordering: indices [0,d) are the g-block, [d,2d) the e-block.
struct HybridState {
  FockBasis basis;
  Matrix matrix;
  int dim() const { return basis.dim; }
};

// Hermiticity / unit trace / eigenvalue-floor check. On failure fills *why
// (when given) with the violated condition.
bool is_valid_density(const Matrix& rho, std::string* why = nullptr);
void require_valid_density(const Matrix& rho, const std::string& what);

// State factories. The factories renormalize over the truncated basis and
// report the pre-normalization tail weight through the optional out
// parameter (the warning channel for truncation systematics).
MotionalState fock_state(int n, int d);
MotionalState coherent_state(Complex alpha, int d, double* truncation_tail = nullptr);
MotionalState thermal_state(double nbar, int d, double* truncation_tail = nullptr);

// Tr[rho Op] for a full operator or a Fock-diagonal one.
Complex expect(const MotionalState& state, const Matrix& op);
Complex expect(const MotionalState& state, const RealVector& diag_op);

// <n^p> = sum_n n^p rho_nn. Ground-truth oracle for every protocol output.
double number_moment(const MotionalState& state, int p);

// Total population in the top k_tail Fock levels. Protocols require this
// below 1e-8 before trusting results.
double leakage(const MotionalState& state, int k_tail);

// |±_phi><±_phi| (x) rho_f, internal-major.
HybridState hybrid_product(const ProbeState& probe, const MotionalState& motional);

// Partial traces over the motional / internal factor.
Matrix reduce_internal(const HybridState& rho);       // 2 x 2
MotionalState reduce_motional(const HybridState& rho);

// Lowering operator a (a[n-1, n] = sqrt(n)) and the diagonal of n-hat.
Matrix lowering_operator(int d);
RealVector number_diag(int d);

double purity(const Matrix& rho);

}  // namespace ionprobe
