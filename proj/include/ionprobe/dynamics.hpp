#pragma once

#include <vector>

#include "ionprobe/couplings.hpp"
#include "ionprobe/fock.hpp"

namespace ionprobe {

enum class DriveKind { carrier, red_sideband, blue_sideband };

// Which dimensionless time is in force: tau = Omega_L t/2 for the carrier
// and multi-laser sideband, tau = eta Omega_L t/2 for the single-laser
// sideband. The stored Hamiltonian is always the coefficient of tau.
enum class TimeConvention { omega_l_half, eta_omega_l_half };

struct DriveSet {
  DriveKind kind;
  std::vector<double> weights;  // carrier: Omega_j/Omega_L; sidebands: the
                                // effective u_j = (Omega_j/Omega_L) eta_j
  std::vector<double> etas;
  TimeConvention time_convention;

  static DriveSet carrier_single(double eta);
  static DriveSet carrier(std::vector<double> weights, std::vector<double> etas);
  // Single sideband laser, tau = eta Omega_L t/2 (the eta is folded into tau,
  // so the effective weight is 1).
  static DriveSet sideband_single(DriveKind kind, double eta);
  // N sideband lasers, tau = Omega_L t/2, effective weights u_j.
  static DriveSet sideband(DriveKind kind, std::vector<double> u_weights,
                           std::vector<double> etas);
};

struct InteractionHamiltonian {
  Matrix matrix;  // 2d x 2d, internal-major, Hermitian
  DriveKind kind;
  DriveSet meta;
  int dim() const { return static_cast<int>(matrix.rows()) / 2; }
};

// H = (sigma+ + sigma-) (x) diag(F0).
InteractionHamiltonian build_carrier(const DriveSet& drives, int d);
// red:  H = i sigma+ (x) F1(n) a  + h.c.
// blue: H = i sigma+ (x) a' F1(n) + h.c.   (a' = a-dagger)
InteractionHamiltonian build_sideband(const DriveSet& drives, int d);
InteractionHamiltonian build_hamiltonian(const DriveSet& drives, int d);

// Exact evolution by Hermitian eigendecomposition, cached so tau sweeps pay
// the eigensolve once. Negative tau is allowed (unitary group), which the
// central-difference slope checks rely on.
class Propagator {
 public:
  explicit Propagator(const InteractionHamiltonian& h);
  explicit Propagator(const Matrix& hermitian);
  Matrix unitary(double tau) const;
  Matrix evolve_matrix(const Matrix& rho0, double tau) const;
  HybridState evolve(const HybridState& rho0, double tau) const;

 private:
  RealVector eigenvalues_;
  Matrix eigenvectors_;
};

HybridState evolve(const InteractionHamiltonian& h, const HybridState& rho0, double tau);

// Trace of the e-block.
double excited_population(const HybridState& rho);

// dP_e/dtau at tau = 0 for the product state |±_phi><±_phi| (x) rho_f:
//   carrier:  -sign sin(phi) <F0>
//   red:      +sign (1/2) <F1 a e^{-i phi} + a' F1 e^{+i phi}>
//   blue:     the same with phi -> -phi
double analytic_slope(const ProbeState& probe, const MotionalState& rho_f,
                      const DriveSet& drives);

// General commutator route (1/i) Tr[rho [|e><e| (x) I, H]], valid for any
// hybrid state, product or not.
double ehrenfest_slope(const HybridState& rho, const InteractionHamiltonian& h);

}  // namespace ionprobe
