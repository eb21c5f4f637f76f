#pragma once

#include <vector>

#include "ionprobe/dynamics.hpp"

namespace ionprobe {

// N-ion chain with one collective mode per ion (1D). Mode frequencies are
// accepted for documentation only: the interaction picture removes them and
// the carrier coupling commutes with every mode population.
struct ChainConfig {
  int n_ions;
  std::vector<int> mode_dims;
  std::vector<double> mode_etas;
  std::vector<double> mode_frequencies = {};  // unused, see above
  int dimension_cap = 4096;

  void validate() const;
};

// Joint mode dimension prod_j dims[j]; full chain dimension 2^N * that.
// Basis ordering is internal-major; internal index s has ion k at bit
// (N-1-k) (ion 0 most significant), modes row-major with mode 0 slowest.
int joint_mode_dim(const ChainConfig& config);
int chain_dim(const ChainConfig& config);  // resource_error past the cap

// Diagonal of the collective coupling: entry prod_j f0(n_j; eta_j) at the
// mode multi-index (n_1..n_N).
RealVector collective_coupling(const ChainConfig& config);

// (sum_k sigma+_k + sigma-_k) (x) diag(collective coupling).
Matrix build_chain_carrier(const ChainConfig& config);

// rho(0) = |±_phi><±_phi| on ion k (x) rho_A on the others (x) rho_f.
// rho_A is 2^{N-1} square over the remaining ions in ascending order.
Matrix chain_initial_state(const ChainConfig& config, int k, const ProbeState& probe,
                           const Matrix& rho_A, const Matrix& rho_f);

double ion_excited_population(const Matrix& rho, const ChainConfig& config, int k);

// Analytic -sign sin(phi) <collective coupling>_{rho_f}; independent of k
// and of rho_A.
double collective_slope(const ChainConfig& config, int k, const ProbeState& probe,
                        const Matrix& rho_A, const Matrix& rho_f);

// Commutator route on a full chain state: (1/i) Tr[rho [P_e^k, H]]. Exact,
// so it exposes the rho_A independence without finite-difference noise.
double chain_ehrenfest_slope(const ChainConfig& config, int k, const Matrix& rho);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace ionprobe
