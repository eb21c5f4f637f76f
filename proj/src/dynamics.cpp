#include "ionprobe/dynamics.hpp"

#include <cmath>

namespace ionprobe {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_lengths(const DriveSet& d) {
  if (d.weights.size() != d.etas.size() || d.weights.empty())
    throw std::domain_error("DriveSet: weights and etas must have equal nonzero length");
}

RealVector sideband_f1(const DriveSet& drives, int d) {
  if (drives.time_convention == TimeConvention::eta_omega_l_half)
    return f1_diag(drives.etas.at(0), d).values;  // eta folded into tau
  return combined_diag(drives.weights, drives.etas, d, CouplingKind::f1);
}

}  // namespace

DriveSet DriveSet::carrier_single(double eta) {
  return {DriveKind::carrier, {1.0}, {eta}, TimeConvention::omega_l_half};
}

DriveSet DriveSet::carrier(std::vector<double> weights, std::vector<double> etas) {
  DriveSet d{DriveKind::carrier, std::move(weights), std::move(etas),
             TimeConvention::omega_l_half};
  check_lengths(d);
  return d;
}

DriveSet DriveSet::sideband_single(DriveKind kind, double eta) {
  if (kind == DriveKind::carrier)
    throw std::domain_error("sideband_single: kind must be a sideband");
  return {kind, {1.0}, {eta}, TimeConvention::eta_omega_l_half};
}

DriveSet DriveSet::sideband(DriveKind kind, std::vector<double> u_weights,
                            std::vector<double> etas) {
  if (kind == DriveKind::carrier)
    throw std::domain_error("sideband: kind must be a sideband");
  DriveSet d{kind, std::move(u_weights), std::move(etas), TimeConvention::omega_l_half};
  check_lengths(d);
  return d;
}

InteractionHamiltonian build_carrier(const DriveSet& drives, int d) {
  if (drives.kind != DriveKind::carrier)
    throw std::domain_error("build_carrier: drive kind mismatch");
  check_lengths(drives);
  const RealVector f0 = combined_diag(drives.weights, drives.etas, d, CouplingKind::f0);
  Matrix h = Matrix::Zero(2 * d, 2 * d);
  for (int n = 0; n < d; ++n) {
    h(n, d + n) = f0(n);
    h(d + n, n) = f0(n);
  }
  return {std::move(h), DriveKind::carrier, drives};
}

InteractionHamiltonian build_sideband(const DriveSet& drives, int d) {
  if (drives.kind == DriveKind::carrier)
    throw std::domain_error("build_sideband: drive kind mismatch");
  check_lengths(drives);
  const RealVector f1 = sideband_f1(drives, d);
  Matrix h = Matrix::Zero(2 * d, 2 * d);
  if (drives.kind == DriveKind::red_sideband) {
    // i sigma+ F1(n) a couples (e, n) <- (g, n+1) with i f1(n) sqrt(n+1).
    for (int n = 0; n + 1 < d; ++n) {
      const Complex elem = kI * f1(n) * std::sqrt(double(n + 1));
      h(d + n, n + 1) = elem;
      h(n + 1, d + n) = std::conj(elem);
    }
  } else {
    // i sigma+ a' F1(n) couples (e, n+1) <- (g, n) with i f1(n) sqrt(n+1).
    for (int n = 0; n + 1 < d; ++n) {
      const Complex elem = kI * f1(n) * std::sqrt(double(n + 1));
      h(d + n + 1, n) = elem;
      h(n, d + n + 1) = std::conj(elem);
    }
  }
  return {std::move(h), drives.kind, drives};
}

InteractionHamiltonian build_hamiltonian(const DriveSet& drives, int d) {
  return drives.kind == DriveKind::carrier ? build_carrier(drives, d)
                                           : build_sideband(drives, d);
}

Propagator::Propagator(const InteractionHamiltonian& h) : Propagator(h.matrix) {}

Propagator::Propagator(const Matrix& hermitian) {
  if (hermitian.rows() != hermitian.cols())
    throw std::domain_error("Propagator: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

Matrix Propagator::unitary(double tau) const {
  ComplexVector phases(eigenvalues_.size());
  for (int i = 0; i < eigenvalues_.size(); ++i)
    phases(i) = std::polar(1.0, -eigenvalues_(i) * tau);
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

Matrix Propagator::evolve_matrix(const Matrix& rho0, double tau) const {
  if (rho0.rows() != eigenvectors_.rows())
    throw std::domain_error("Propagator: state dimension mismatch");
  const Matrix u = unitary(tau);
  Matrix rho = u * rho0 * u.adjoint();
  rho = 0.5 * (rho + Matrix(rho.adjoint()));  // strip roundoff skew
  return rho;
}

HybridState Propagator::evolve(const HybridState& rho0, double tau) const {
  return {rho0.basis, evolve_matrix(rho0.matrix, tau)};
}

HybridState evolve(const InteractionHamiltonian& h, const HybridState& rho0, double tau) {
  return Propagator(h).evolve(rho0, tau);
}

double excited_population(const HybridState& rho) {
  const int d = rho.dim();
  double acc = 0.0;
  for (int n = 0; n < d; ++n) acc += rho.matrix(d + n, d + n).real();
  return acc;
}

double analytic_slope(const ProbeState& probe, const MotionalState& rho_f,
                      const DriveSet& drives) {
  check_lengths(drives);
  const int d = rho_f.dim();
  const double sign = double(probe.sign);
  if (drives.kind == DriveKind::carrier) {
    const RealVector f0 = combined_diag(drives.weights, drives.etas, d, CouplingKind::f0);
    return -sign * std::sin(probe.phase) * expect(rho_f, f0).real();
  }
  const RealVector f1 = sideband_f1(drives, d);
  const double phi = (drives.kind == DriveKind::red_sideband) ? probe.phase : -probe.phase;
  const Matrix a = lowering_operator(d);
  const Matrix fa = f1.cast<Complex>().asDiagonal() * a;
  const Matrix op = fa * std::polar(1.0, -phi) + fa.adjoint() * std::polar(1.0, phi);
  return sign * 0.5 * expect(rho_f, op).real();
}

double ehrenfest_slope(const HybridState& rho, const InteractionHamiltonian& h) {
  if (rho.matrix.rows() != h.matrix.rows())
    throw std::domain_error("ehrenfest_slope: dimension mismatch");
  const int d = rho.dim();
  // (1/i)<[P_e, H]> = 2 Im sum_{j in e-block} (H rho)_{jj}.
  Complex z = 0.0;
  for (int j = d; j < 2 * d; ++j) z += (h.matrix.row(j) * rho.matrix.col(j))(0, 0);
  return 2.0 * z.imag();
}

}  // namespace ionprobe
