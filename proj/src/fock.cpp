#include "ionprobe/fock.hpp"

#include <cmath>
#include <numbers>

namespace ionprobe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix pure_state_density(const ComplexVector& amplitudes) {
  return amplitudes * amplitudes.adjoint();
}

}  // namespace

ProbeState::ProbeState(int sign_token, double phi) : sign(sign_token), phase(phi) {
  if (sign != 1 && sign != -1)
    throw std::domain_error("ProbeState: sign token must be +1 or -1");
  phase = std::fmod(phase, kTwoPi);
  if (phase < 0) phase += kTwoPi;
}

bool is_valid_density(const Matrix& rho, std::string* why) {
  if (rho.rows() != rho.cols()) {
    if (why) *why = "matrix not square";
    return false;
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    if (why) *why = "not Hermitian (deviation " + std::to_string(herm) + ")";
    return false;
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    if (why) *why = "trace deviates from 1 by " + std::to_string(tr - 1.0);
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min < kEigenvalueFloor) {
    if (why) *why = "negative eigenvalue " + std::to_string(lambda_min);
    return false;
  }
  return true;
}

void require_valid_density(const Matrix& rho, const std::string& what) {
  std::string why;
  if (!is_valid_density(rho, &why))
    throw std::domain_error(what + ": invalid density matrix: " + why);
}

MotionalState fock_state(int n, int d) {
  FockBasis basis(d);
  if (n < 0 || n >= d)
    throw std::domain_error("fock_state: n out of range [0, d)");
  Matrix rho = Matrix::Zero(d, d);
  rho(n, n) = 1.0;
  return {basis, std::move(rho)};
}

MotionalState coherent_state(Complex alpha, int d, double* truncation_tail) {
  FockBasis basis(d);
  ComplexVector c(d);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < d; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  const double captured = c.squaredNorm();
  if (truncation_tail) *truncation_tail = std::max(0.0, 1.0 - captured);
  c /= std::sqrt(captured);
  return {basis, pure_state_density(c)};
}

MotionalState thermal_state(double nbar, int d, double* truncation_tail) {
  FockBasis basis(d);
  if (nbar < 0) throw std::domain_error("thermal_state: nbar must be >= 0");
  Matrix rho = Matrix::Zero(d, d);
  if (nbar == 0.0) {
    rho(0, 0) = 1.0;
    if (truncation_tail) *truncation_tail = 0.0;
    return {basis, std::move(rho)};
  }
  const double r = nbar / (nbar + 1.0);
  double captured = 0.0;
  double pn = 1.0 / (nbar + 1.0);
  for (int n = 0; n < d; ++n) {
    rho(n, n) = pn;
    captured += pn;
    pn *= r;
  }
  if (truncation_tail) *truncation_tail = std::max(0.0, 1.0 - captured);
  rho /= captured;
  return {basis, std::move(rho)};
}

Complex expect(const MotionalState& state, const Matrix& op) {
  if (op.rows() != state.dim() || op.cols() != state.dim())
    throw std::domain_error("expect: operator dimension mismatch");
  return (state.matrix * op).trace();
}

Complex expect(const MotionalState& state, const RealVector& diag_op) {
  if (diag_op.size() != state.dim())
    throw std::domain_error("expect: operator dimension mismatch");
  Complex acc = 0.0;
  for (int n = 0; n < state.dim(); ++n) acc += state.matrix(n, n) * diag_op(n);
  return acc;
}

double number_moment(const MotionalState& state, int p) {
  if (p < 0) throw std::domain_error("number_moment: p must be >= 0");
  double acc = 0.0;
  for (int n = 0; n < state.dim(); ++n)
    acc += std::pow(double(n), double(p)) * state.matrix(n, n).real();
  return acc;
}

double leakage(const MotionalState& state, int k_tail) {
  const int d = state.dim();
  if (k_tail <= 0 || k_tail >= d)
    throw std::domain_error("leakage: k_tail must satisfy 0 < k_tail < d");
  double acc = 0.0;
  for (int n = d - k_tail; n < d; ++n) acc += state.matrix(n, n).real();
  return acc;
}

HybridState hybrid_product(const ProbeState& probe, const MotionalState& motional) {
  const int d = motional.dim();
  const Complex phase = std::polar(1.0, probe.phase);
  // |±_phi><±_phi| in the {g, e} basis.
  Eigen::Matrix2cd internal;
  internal(0, 0) = 0.5;
  internal(1, 1) = 0.5;
  internal(1, 0) = 0.5 * double(probe.sign) * phase;
  internal(0, 1) = std::conj(internal(1, 0));
  Matrix rho(2 * d, 2 * d);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      rho.block(s * d, t * d, d, d) = internal(s, t) * motional.matrix;
  return {motional.basis, std::move(rho)};
}

Matrix reduce_internal(const HybridState& rho) {
  const int d = rho.dim();
  Matrix out = Matrix::Zero(2, 2);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      out(s, t) = rho.matrix.block(s * d, t * d, d, d).trace();
  return out;
}

MotionalState reduce_motional(const HybridState& rho) {
  const int d = rho.dim();
  Matrix out = rho.matrix.block(0, 0, d, d) + rho.matrix.block(d, d, d, d);
  return {rho.basis, std::move(out)};
}

Matrix lowering_operator(int d) {
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

RealVector number_diag(int d) {
  RealVector n(d);
  for (int i = 0; i < d; ++i) n(i) = double(i);
  return n;
}

double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

}  // namespace ionprobe
