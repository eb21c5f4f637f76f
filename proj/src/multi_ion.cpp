#include "ionprobe/multi_ion.hpp"

#include <cmath>
#include <string>

namespace ionprobe {

namespace {

int ion_bit(const ChainConfig& config, int k) { return config.n_ions - 1 - k; }

// Split internal index s into (bit value of ion k, packed index of the rest).
std::pair<int, int> split_internal(const ChainConfig& config, int s, int k) {
  const int bit = ion_bit(config, k);
  const int b = (s >> bit) & 1;
  const int high = s >> (bit + 1);
  const int low = s & ((1 << bit) - 1);
  return {b, (high << bit) | low};
}

}  // namespace

void ChainConfig::validate() const {
  if (n_ions < 1) throw std::domain_error("ChainConfig: n_ions must be >= 1");
  if (static_cast<int>(mode_dims.size()) != n_ions ||
      static_cast<int>(mode_etas.size()) != n_ions)
    throw std::domain_error("ChainConfig: one mode dim and one eta per ion required");
  for (int d : mode_dims)
    if (d < 2) throw std::domain_error("ChainConfig: mode dims must be >= 2");
  for (double e : mode_etas)
    if (e < 0) throw std::domain_error("ChainConfig: mode etas must be >= 0");
}

int joint_mode_dim(const ChainConfig& config) {
  config.validate();
  long long dim = 1;
  for (int d : config.mode_dims) dim *= d;
  if (dim > config.dimension_cap)
    throw resource_error("chain mode space dimension " + std::to_string(dim) +
                         " exceeds the cap " + std::to_string(config.dimension_cap));
  return static_cast<int>(dim);
}

int chain_dim(const ChainConfig& config) {
  const long long dim = (1LL << config.n_ions) * joint_mode_dim(config);
  if (dim > config.dimension_cap)
    throw resource_error("chain dimension " + std::to_string(dim) +
                         " exceeds the cap " + std::to_string(config.dimension_cap));
  return static_cast<int>(dim);
}

RealVector collective_coupling(const ChainConfig& config) {
  const int dm = joint_mode_dim(config);
  std::vector<RealVector> per_mode(config.n_ions);
  for (int j = 0; j < config.n_ions; ++j)
    per_mode[j] = f0_diag(config.mode_etas[j], config.mode_dims[j]).values;
  RealVector out(dm);
  for (int idx = 0; idx < dm; ++idx) {
    int rem = idx;
    double prod = 1.0;
    for (int j = config.n_ions - 1; j >= 0; --j) {
      prod *= per_mode[j](rem % config.mode_dims[j]);
      rem /= config.mode_dims[j];
    }
    out(idx) = prod;
  }
  return out;
}

Matrix build_chain_carrier(const ChainConfig& config) {
  const int dim = chain_dim(config);
  const int dm = joint_mode_dim(config);
  const int ni = 1 << config.n_ions;
  const RealVector f = collective_coupling(config);
  Matrix h = Matrix::Zero(dim, dim);
  for (int s = 0; s < ni; ++s)
    for (int k = 0; k < config.n_ions; ++k) {
      const int t = s ^ (1 << ion_bit(config, k));  // flip ion k
      for (int m = 0; m < dm; ++m) h(t * dm + m, s * dm + m) = f(m);
    }
  return h;
}

Matrix chain_initial_state(const ChainConfig& config, int k, const ProbeState& probe,
                           const Matrix& rho_A, const Matrix& rho_f) {
  const int dm = joint_mode_dim(config);
  const int ni = 1 << config.n_ions;
  if (k < 0 || k >= config.n_ions)
    throw std::domain_error("chain_initial_state: ion index out of range");
  const int rest_dim = ni / 2;
  if (rho_A.rows() != rest_dim || rho_A.cols() != rest_dim)
    throw std::domain_error("chain_initial_state: rho_A must cover the other ions (2^{N-1})");
  if (rho_f.rows() != dm || rho_f.cols() != dm)
    throw std::domain_error("chain_initial_state: rho_f must cover the joint mode space");

  Eigen::Matrix2cd probe_rho;
  probe_rho(0, 0) = 0.5;
  probe_rho(1, 1) = 0.5;
  probe_rho(1, 0) = 0.5 * double(probe.sign) * std::polar(1.0, probe.phase);
  probe_rho(0, 1) = std::conj(probe_rho(1, 0));

  Matrix internal(ni, ni);
  for (int s = 0; s < ni; ++s)
    for (int t = 0; t < ni; ++t) {
      const auto [bs, rs] = split_internal(config, s, k);
      const auto [bt, rt] = split_internal(config, t, k);
      internal(s, t) = probe_rho(bs, bt) * rho_A(rs, rt);
    }
  return kron(internal, rho_f);
}

double ion_excited_population(const Matrix& rho, const ChainConfig& config, int k) {
  const int dm = joint_mode_dim(config);
  const int ni = 1 << config.n_ions;
  if (rho.rows() != ni * dm)
    throw std::domain_error("ion_excited_population: state dimension mismatch");
  if (k < 0 || k >= config.n_ions)
    throw std::domain_error("ion_excited_population: ion index out of range");
  const int bit = ion_bit(config, k);
  double acc = 0.0;
  for (int s = 0; s < ni; ++s) {
    if (((s >> bit) & 1) == 0) continue;
    for (int m = 0; m < dm; ++m) acc += rho(s * dm + m, s * dm + m).real();
  }
  return acc;
}

double collective_slope(const ChainConfig& config, int k, const ProbeState& probe,
                        const Matrix& rho_A, const Matrix& rho_f) {
  const int dm = joint_mode_dim(config);
  if (k < 0 || k >= config.n_ions)
    throw std::domain_error("collective_slope: ion index out of range");
  const int rest_dim = (1 << config.n_ions) / 2;
  if (rho_A.rows() != rest_dim || rho_A.cols() != rest_dim)
    throw std::domain_error("collective_slope: rho_A dimension mismatch");
  if (rho_f.rows() != dm || rho_f.cols() != dm)
    throw std::domain_error("collective_slope: rho_f dimension mismatch");
  const RealVector f = collective_coupling(config);
  Complex mean = 0.0;
  for (int m = 0; m < dm; ++m) mean += rho_f(m, m) * f(m);
  return -double(probe.sign) * std::sin(probe.phase) * mean.real();
}

double chain_ehrenfest_slope(const ChainConfig& config, int k, const Matrix& rho) {
  const int dm = joint_mode_dim(config);
  const int ni = 1 << config.n_ions;
  if (rho.rows() != ni * dm)
    throw std::domain_error("chain_ehrenfest_slope: state dimension mismatch");
  if (k < 0 || k >= config.n_ions)
    throw std::domain_error("chain_ehrenfest_slope: ion index out of range");
  const Matrix h = build_chain_carrier(config);
  const int bit = ion_bit(config, k);
  Complex z = 0.0;
  for (int s = 0; s < ni; ++s) {
    if (((s >> bit) & 1) == 0) continue;
    for (int m = 0; m < dm; ++m) {
      const int j = s * dm + m;
      z += (h.row(j) * rho.col(j))(0, 0);
    }
  }
  return 2.0 * z.imag();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace ionprobe
