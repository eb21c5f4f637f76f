#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ionprobe/multi_ion.hpp"

using namespace ionprobe;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix random_density(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> gauss;
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

ChainConfig two_ion_config() {
  ChainConfig c;
  c.n_ions = 2;
  c.mode_dims = {6, 6};
  c.mode_etas = {0.3, 0.5};
  return c;
}

double ion_slope_central_difference(const ChainConfig& config, int k,
                                    const Matrix& rho0, double h_step) {
  const Propagator prop(build_chain_carrier(config));
  return (ion_excited_population(prop.evolve_matrix(rho0, h_step), config, k) -
          ion_excited_population(prop.evolve_matrix(rho0, -h_step), config, k)) /
         (2 * h_step);
}

}  // namespace

TEST_CASE("collective coupling composition") {
  ChainConfig single;
  single.n_ions = 1;
  single.mode_dims = {8};
  single.mode_etas = {0.4};
  CHECK((collective_coupling(single) - f0_diag(0.4, 8).values).cwiseAbs().maxCoeff() <
        1e-15);

  ChainConfig two;
  two.n_ions = 2;
  two.mode_dims = {4, 6};
  two.mode_etas = {0.0, 0.3};
  const RealVector f = collective_coupling(two);
  const RealVector f03 = f0_diag(0.3, 6).values;
  for (int n1 = 0; n1 < 4; ++n1)
    for (int n2 = 0; n2 < 6; ++n2)
      CHECK(f(n1 * 6 + n2) == doctest::Approx(f03(n2)).epsilon(1e-14));

  two.mode_etas = {0.3, 0.5};
  const RealVector g = collective_coupling(two);
  CHECK(g(1 * 6 + 2) == doctest::Approx(f0_diag(0.3, 4).values(1) *
                                        f0_diag(0.5, 6).values(2)).epsilon(1e-14));
}

TEST_CASE("chain carrier construction") {
  ChainConfig two = two_ion_config();
  const Matrix h = build_chain_carrier(two);
  CHECK(h.rows() == 4 * 36);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

  // eta = (0, 0): pure sum of sigma_x couplings.
  ChainConfig flat = two;
  flat.mode_etas = {0.0, 0.0};
  const Matrix hf = build_chain_carrier(flat);
  CHECK(hf.cwiseAbs().maxCoeff() == doctest::Approx(1.0));

  // Single ion reduces to the single-ion carrier.
  ChainConfig single;
  single.n_ions = 1;
  single.mode_dims = {6};
  single.mode_etas = {0.4};
  const Matrix h1 = build_chain_carrier(single);
  const InteractionHamiltonian ref = build_carrier(DriveSet::carrier_single(0.4), 6);
  CHECK((h1 - ref.matrix).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dimension cap enforcement") {
  ChainConfig big;
  big.n_ions = 3;
  big.mode_dims = {16, 16, 16};
  big.mode_etas = {0.3, 0.3, 0.3};
  CHECK_THROWS_AS(build_chain_carrier(big), resource_error);
}

TEST_CASE("collective slope anchors") {
  const ChainConfig two = two_ion_config();
  Matrix rho_a = Matrix::Zero(2, 2);
  rho_a(0, 0) = 1.0;
  Matrix vacuum = Matrix::Zero(36, 36);
  vacuum(0, 0) = 1.0;

  const double slope = collective_slope(two, 0, ProbeState(+1, kPi / 2), rho_a, vacuum);
  CHECK(slope == doctest::Approx(-std::exp(-0.09 / 2) * std::exp(-0.25 / 2)).epsilon(1e-13));
  CHECK(collective_slope(two, 0, ProbeState(+1, 0.0), rho_a, vacuum) == doctest::Approx(0.0));
  CHECK_THROWS_AS(collective_slope(two, 2, ProbeState(+1, 1.0), rho_a, vacuum),
                  std::domain_error);
}

TEST_CASE("slope is independent of the other ions' state") {
  const ChainConfig two = two_ion_config();
  std::mt19937_64 rng(31);
  const MotionalState m0 = thermal_state(0.4, 6);
  const MotionalState m1 = coherent_state(0.7, 6);
  const Matrix rho_f = kron(m0.matrix, m1.matrix);
  const ProbeState probe(+1, kPi / 2);

  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  const double base = collective_slope(two, 0, probe, ground, rho_f);
  CHECK(collective_slope(two, 0, probe, excited, rho_f) ==
        doctest::Approx(base).epsilon(1e-12));
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix rho_a = random_density(rng, 2);
    CHECK(collective_slope(two, 0, probe, rho_a, rho_f) ==
          doctest::Approx(base).epsilon(1e-10));
    // The simulated readout is rho_A independent too.
    const Matrix rho0 = chain_initial_state(two, 0, probe, rho_a, rho_f);
    CHECK(ion_slope_central_difference(two, 0, rho0, 1e-4) ==
          doctest::Approx(base).epsilon(1e-4));
  }
}

TEST_CASE("factorization over product motional states") {
  const ChainConfig two = two_ion_config();
  const MotionalState m0 = coherent_state(Complex(0.5, 0.3), 6);
  const MotionalState m1 = thermal_state(0.6, 6);
  const Matrix rho_f = kron(m0.matrix, m1.matrix);

  Complex mean = 0.0;
  const RealVector f = collective_coupling(two);
  for (int m = 0; m < 36; ++m) mean += rho_f(m, m) * f(m);

  const double product = expect(m0, f0_diag(0.3, 6).values).real() *
                         expect(m1, f0_diag(0.5, 6).values).real();
  CHECK(mean.real() == doctest::Approx(product).epsilon(1e-12));
}

TEST_CASE("analytic slope matches the simulated single-ion readout") {
  const ChainConfig two = two_ion_config();
  const ProbeState probe(-1, 0.9);
  Matrix rho_a = Matrix::Zero(2, 2);
  rho_a(0, 0) = 0.3;
  rho_a(1, 1) = 0.7;
  const Matrix rho_f = kron(thermal_state(0.3, 6).matrix, coherent_state(0.6, 6).matrix);
  const Matrix rho0 = chain_initial_state(two, 0, probe, rho_a, rho_f);

  const double analytic = collective_slope(two, 0, probe, rho_a, rho_f);
  CHECK(std::abs(ion_slope_central_difference(two, 0, rho0, 1e-4) - analytic) < 1e-6);

  // Probing the second ion reads the same collective mean.
  const Matrix rho0b = chain_initial_state(two, 1, probe, rho_a, rho_f);
  CHECK(std::abs(ion_slope_central_difference(two, 1, rho0b, 1e-4) - analytic) < 1e-6);
}

TEST_CASE("single-ion chain reduces to the dynamics module") {
  ChainConfig single;
  single.n_ions = 1;
  single.mode_dims = {8};
  single.mode_etas = {0.35};
  const ProbeState probe(+1, 1.3);
  const MotionalState rho_f = coherent_state(Complex(0.4, 0.5), 8);
  const Matrix rho_a = Matrix::Identity(1, 1);

  const double chain = collective_slope(single, 0, probe, rho_a, rho_f.matrix);
  const double direct = analytic_slope(probe, rho_f, DriveSet::carrier_single(0.35));
  CHECK(chain == doctest::Approx(direct).epsilon(1e-12));

  const Matrix rho0 = chain_initial_state(single, 0, probe, rho_a, rho_f.matrix);
  const HybridState hyb = hybrid_product(probe, rho_f);
  CHECK((rho0 - hyb.matrix).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("config validation") {
  ChainConfig bad;
  bad.n_ions = 2;
  bad.mode_dims = {6};
  bad.mode_etas = {0.3, 0.5};
  CHECK_THROWS_AS(joint_mode_dim(bad), std::domain_error);
  bad.mode_dims = {6, 1};
  CHECK_THROWS_AS(joint_mode_dim(bad), std::domain_error);
}
