#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ionprobe/protocols.hpp"

using namespace ionprobe;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("estimate_slope exact mode returns the analytic derivative") {
  const MeasurementPlan plan = MeasurementPlan::exact();

  const InteractionHamiltonian flat = build_carrier(DriveSet::carrier_single(0.0), 24);
  const SlopeEstimate s = estimate_slope(flat, ProbeState(+1, kPi / 2),
                                         thermal_state(0.3, 24), plan);
  CHECK(s.value == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.stderr_value == 0.0);
  CHECK(s.method == SlopeMethod::exact_analytic);

  // Lower probe sign on fock(2): +f0(2; 0.3).
  const InteractionHamiltonian h = build_carrier(DriveSet::carrier_single(0.3), 8);
  const SlopeEstimate s2 = estimate_slope(h, ProbeState(-1, kPi / 2), fock_state(2, 8), plan);
  CHECK(s2.value == doctest::Approx(f0_diag(0.3, 8).values(2)).epsilon(1e-12));
  CHECK(s2.value == doctest::Approx(analytic_slope(ProbeState(-1, kPi / 2), fock_state(2, 8),
                                                   DriveSet::carrier_single(0.3)))
                        .epsilon(1e-13));
}

TEST_CASE("estimate_slope validates plan and leakage") {
  const InteractionHamiltonian h = build_carrier(DriveSet::carrier_single(0.3), 8);
  MeasurementPlan plan = MeasurementPlan::noiseless_fit();
  plan.tau_grid = {0.01, 0.02};  // fewer points than fit order 2 needs
  CHECK_THROWS_AS(estimate_slope(h, ProbeState(+1, kPi / 2), fock_state(0, 8), plan),
                  std::domain_error);
  plan = MeasurementPlan::noiseless_fit();
  plan.tau_grid.back() = 0.25;  // past the linear-regime cap
  CHECK_THROWS_AS(estimate_slope(h, ProbeState(+1, kPi / 2), fock_state(0, 8), plan),
                  std::domain_error);
  // Boundary Fock state fails the leakage gate.
  CHECK_THROWS_AS(estimate_slope(h, ProbeState(+1, kPi / 2), fock_state(7, 8),
                                 MeasurementPlan::exact()),
                  precision_error);
}

TEST_CASE("noiseless fit tracks the slope within the curvature budget") {
  const InteractionHamiltonian h = build_carrier(DriveSet::carrier_single(0.4), 16);
  const MotionalState rho_f = coherent_state(1.0, 16);
  const SlopeEstimate fit = estimate_slope(h, ProbeState(+1, kPi / 2), rho_f,
                                           MeasurementPlan::noiseless_fit());
  const double exact = analytic_slope(ProbeState(+1, kPi / 2), rho_f,
                                      DriveSet::carrier_single(0.4));
  CHECK(fit.method == SlopeMethod::fit_noiseless);
  CHECK(std::abs(fit.value - exact) < 1e-2);
}

TEST_CASE("shot-noise slope estimates cover the truth") {
  const InteractionHamiltonian h = build_carrier(DriveSet::carrier_single(0.3), 32);
  const MotionalState rho_f = thermal_state(0.5, 32);
  const ProbeState probe(+1, kPi / 2);
  const double truth = analytic_slope(probe, rho_f, DriveSet::carrier_single(0.3));

  int within4 = 0;
  std::vector<double> values;
  double stderr_sum = 0.0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const SlopeEstimate est =
        estimate_slope(h, probe, rho_f, MeasurementPlan::with_shots(10000, 1000 + rep));
    if (std::abs(est.value - truth) <= 4 * est.stderr_value) ++within4;
    values.push_back(est.value);
    stderr_sum += est.stderr_value;
  }
  CHECK(within4 >= reps * 95 / 100);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= reps;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double empirical_sd = std::sqrt(var / (reps - 1));
  const double mean_stderr = stderr_sum / reps;
  CHECK(empirical_sd / mean_stderr < 1.5);
  CHECK(mean_stderr / empirical_sd < 1.5);

  // Same seed reproduces; different seed does not.
  const SlopeEstimate a = estimate_slope(h, probe, rho_f, MeasurementPlan::with_shots(2000, 5));
  const SlopeEstimate b = estimate_slope(h, probe, rho_f, MeasurementPlan::with_shots(2000, 5));
  const SlopeEstimate c = estimate_slope(h, probe, rho_f, MeasurementPlan::with_shots(2000, 6));
  CHECK(a.value == b.value);
  CHECK(a.value != c.value);
}

TEST_CASE("two_eta normalized inversion is exact on the quadratic model") {
  // Vacuum signature: means (1, 1) invert to (0, 0).
  const auto [z1, z2] = two_eta_invert_normalized(1.0, 0.01, 1.0, 0.04);
  CHECK(std::abs(z1) < 1e-12);
  CHECK(std::abs(z2) < 1e-12);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uni(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double m1 = uni(rng), capital_m2 = uni(rng);
    // Moderate eta: conditioning leaves the full double precision.
    const double x1 = 0.05 + 0.08 * uni(rng);
    const double x2 = x1 + 0.05 + 0.08 * uni(rng);
    const double g1 = 1.0 - x1 * m1 + x1 * x1 / 4.0 * capital_m2;
    const double g2 = 1.0 - x2 * m1 + x2 * x2 / 4.0 * capital_m2;
    const auto [r1, r2] = two_eta_invert_normalized(g1, x1, g2, x2);
    CHECK(r1 == doctest::Approx(m1).epsilon(1e-12));
    CHECK(r2 == doctest::Approx(capital_m2 + m1).epsilon(1e-12));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const double m1 = uni(rng), capital_m2 = uni(rng);
    // Small eta: the (g - 1) cancellation caps the recovery near 1e-10.
    const double x1 = 0.002 + 0.01 * uni(rng);
    const double x2 = x1 + 0.003 + 0.01 * uni(rng);
    const double g1 = 1.0 - x1 * m1 + x1 * x1 / 4.0 * capital_m2;
    const double g2 = 1.0 - x2 * m1 + x2 * x2 / 4.0 * capital_m2;
    const auto [r1, r2] = two_eta_invert_normalized(g1, x1, g2, x2);
    CHECK(std::abs(r1 - m1) < 1e-9);
    CHECK(std::abs(r2 - (capital_m2 + m1)) < 1e-9);
  }
  CHECK_THROWS_AS(two_eta_invert_normalized(1.0, 0.01, 1.0, 0.01), singularity_error);
}

TEST_CASE("moments_two_eta recovers Fock(1) from exact means") {
  const MotionalState rho_f = fock_state(1, 16);
  const double f1 = expect(rho_f, f0_diag(0.05, 16).values).real();
  const double f2 = expect(rho_f, f0_diag(0.08, 16).values).real();
  const auto [m1, m2] = moments_two_eta(f1, 0.05, f2, 0.08);
  CHECK(m1.value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(m2.value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(m1.route == MomentEstimate::Route::two_eta);
  CHECK_THROWS_AS(moments_two_eta(f1, 0.05, f2, 0.05), singularity_error);
}

TEST_CASE("moments_two_eta bias stays on the third-falling-moment scale") {
  // The two-point inversion is blind to <n(n-1)(n-2)>; its residual bias is
  // (x1 x2)/36 on <n> and (x1+x2)/9 + x1 x2/36 on <n^2>, both proportional
  // to that moment. Verify the measured bias against this scale.
  const double e1 = 0.05, e2 = 0.08;
  const double x1 = e1 * e1, x2 = e2 * e2;
  struct Case {
    MotionalState state;
    double falling3;
  };
  const Case cases[] = {
      {coherent_state(std::sqrt(2.0), 48), 8.0},    // mu^3
      {thermal_state(0.5, 96), 6.0 * 0.125},        // 3! nbar^3
  };
  for (const Case& c : cases) {
    const double f1 = expect(c.state, f0_diag(e1, c.state.dim()).values).real();
    const double f2 = expect(c.state, f0_diag(e2, c.state.dim()).values).real();
    const auto [m1, m2] = moments_two_eta(f1, e1, f2, e2);
    const double true1 = number_moment(c.state, 1);
    const double true2 = number_moment(c.state, 2);
    CHECK(std::abs(m1.value - true1) < 2.0 * c.falling3 * x1 * x2 / 36.0 + 1e-9);
    CHECK(std::abs(m2.value - true2) <
          2.0 * c.falling3 * ((x1 + x2) / 9.0 + x1 * x2 / 36.0) + 1e-9);
  }
}

TEST_CASE("fano_mandel classifications") {
  const MomentEstimate fock_m1{1, 2.0, 0.0, MomentEstimate::Route::oracle};
  const MomentEstimate fock_m2{2, 4.0, 0.0, MomentEstimate::Route::oracle};
  CHECK(fano_mandel(fock_m1, fock_m2).q == doctest::Approx(0.0));

  const MomentEstimate coh_m1{1, 2.0, 0.01, MomentEstimate::Route::oracle};
  const MomentEstimate coh_m2{2, 6.0, 0.05, MomentEstimate::Route::oracle};
  const FanoMandelEstimate q = fano_mandel(coh_m1, coh_m2);
  CHECK(q.q == doctest::Approx(1.0));
  CHECK(q.stderr_value > 0.0);

  const MomentEstimate th_m1{1, 0.5, 0.0, MomentEstimate::Route::oracle};
  const MomentEstimate th_m2{2, 1.0, 0.0, MomentEstimate::Route::oracle};
  CHECK(fano_mandel(th_m1, th_m2).q == doctest::Approx(1.5));

  const MomentEstimate vac{1, 0.0, 0.0, MomentEstimate::Route::oracle};
  CHECK_THROWS_AS(fano_mandel(vac, th_m2), std::domain_error);
}

TEST_CASE("moment_engineered matches the oracle within its budget") {
  const std::vector<double> etas = equispaced_etas(5, 1.0);
  const MeasurementPlan plan = MeasurementPlan::exact();

  const MomentEstimate fock3 = moment_engineered(fock_state(3, 32), 1, etas, plan);
  CHECK(std::abs(fock3.value - 3.0) <= fock3.budget() + 1e-8);

  const MomentEstimate vac = moment_engineered(fock_state(0, 32), 2, etas, plan);
  CHECK(std::abs(vac.value) <= vac.budget() + 1e-8);

  const MomentEstimate th = moment_engineered(thermal_state(0.5, 32), 2, etas, plan);
  CHECK(std::abs(th.value - 1.0) <= th.budget() + 1e-8);
  CHECK(th.route == MomentEstimate::Route::engineered);
  CHECK(th.residual_error > 0.0);

  CHECK_THROWS_AS(moment_engineered(fock_state(0, 32), 5, etas, plan), std::domain_error);
}

TEST_CASE("protocol-vs-oracle across the factory states") {
  const std::vector<double> etas = equispaced_etas(5, 1.0);
  const MeasurementPlan plan = MeasurementPlan::exact();
  std::vector<MotionalState> states;
  for (int n = 0; n <= 3; ++n) states.push_back(fock_state(n, 32));
  states.push_back(coherent_state(1.0, 32));
  states.push_back(coherent_state(std::sqrt(2.0), 32));
  states.push_back(thermal_state(0.3, 32));
  states.push_back(thermal_state(1.0, 48));
  for (const MotionalState& st : states)
    for (int p = 1; p <= 3; ++p) {
      const MomentEstimate est = moment_engineered(st, p, etas, plan);
      CHECK(std::abs(est.value - number_moment(st, p)) <= est.budget() + 1e-8);
    }
}

TEST_CASE("contrast law: slope scales as sin(phi)") {
  const MotionalState rho_f = coherent_state(0.9, 24);
  const InteractionHamiltonian h = build_carrier(DriveSet::carrier_single(0.45), 24);
  const MeasurementPlan plan = MeasurementPlan::exact();
  double reference = 0.0;
  bool first = true;
  for (double phi : {kPi / 6, kPi / 4, kPi / 2}) {
    const SlopeEstimate est = estimate_slope(h, ProbeState(+1, phi), rho_f, plan);
    const double scaled = est.value / std::sin(phi);
    if (first) {
      reference = scaled;
      first = false;
    } else {
      CHECK(scaled == doctest::Approx(reference).epsilon(1e-9));
    }
  }
}

TEST_CASE("generalized quadrature oracle anchors") {
  const int d = 24;
  CHECK(generalized_quadrature_oracle(fock_state(3, d), RealVector::Ones(d), 0.7) ==
        doctest::Approx(0.0));
  CHECK(generalized_quadrature_oracle(coherent_state(1.0, d), RealVector::Ones(d), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-10));
  // Nonlinear kernel against a directly assembled trace.
  const MotionalState coh = coherent_state(Complex(0.6, 0.3), d);
  const RealVector f1 = f1_diag(0.5, d).values;
  const Matrix a = lowering_operator(d);
  const Matrix op = 0.5 * (f1.cast<Complex>().asDiagonal() * a +
                           a.adjoint() * Matrix(f1.cast<Complex>().asDiagonal()));
  CHECK(generalized_quadrature_oracle(coh, f1, 0.0) ==
        doctest::Approx((coh.matrix * op).trace().real()).epsilon(1e-12));
}

TEST_CASE("quadrature_measure recovers coherent amplitudes") {
  const MeasurementPlan plan = MeasurementPlan::exact();
  const DriveSet ld = DriveSet::sideband_single(DriveKind::red_sideband, 0.05);

  for (double phi : {0.0, 1.1}) {
    const QuadratureEstimate vac = quadrature_measure(fock_state(0, 16), phi, ld, plan);
    CHECK(std::abs(vac.value) < 1e-12);
  }

  const QuadratureEstimate est = quadrature_measure(coherent_state(1.0, 32), 0.0, ld, plan);
  // Raw value carries the F1 deviation, which the oracle bias bounds.
  CHECK(std::abs(est.value - 1.0) <= 1e-3 + std::abs(est.f1_bias));
  CHECK(est.value - est.f1_bias == doctest::Approx(1.0).epsilon(1e-12));

  // Phase sweep traces cos(arg alpha - phi).
  const MotionalState rot = coherent_state(std::polar(1.0, kPi / 3), 32);
  for (int k = 0; k < 8; ++k) {
    const double phi = 2 * kPi * k / 8;
    const QuadratureEstimate q = quadrature_measure(rot, phi, ld, plan);
    CHECK(q.value - q.f1_bias == doctest::Approx(std::cos(kPi / 3 - phi)).epsilon(1e-10));
  }

  CHECK_THROWS_AS(quadrature_measure(coherent_state(1.0, 16), 0.0,
                                     DriveSet::carrier_single(0.05), plan),
                  std::domain_error);
  // Flatness gate: a single strong-eta laser is rejected outside LD.
  CHECK_THROWS_AS(quadrature_measure(thermal_state(1.0, 32), 0.0,
                                     DriveSet::sideband_single(DriveKind::red_sideband, 0.8),
                                     plan),
                  precision_error);
}

TEST_CASE("engineered flat F1 passes the gate outside the LD regime") {
  // Fit effective weights so sum_j u_j f1(n; eta_j) hugs 1 over the
  // populated levels, with etas well outside LD.
  const int d = 32;
  const std::vector<double> etas{0.2, 0.35, 0.5, 0.65, 0.8};
  Eigen::MatrixXd cols(12, 5);
  for (int j = 0; j < 5; ++j)
    cols.col(j) = f1_diag(etas[j], 12).values;
  const Eigen::VectorXd u = cols.colPivHouseholderQr().solve(Eigen::VectorXd::Ones(12));
  const DriveSet drives = DriveSet::sideband(
      DriveKind::red_sideband, std::vector<double>(u.data(), u.data() + 5), etas);

  const RealVector f1 = combined_diag(std::vector<double>(u.data(), u.data() + 5),
                                      etas, 12, CouplingKind::f1);
  CHECK((f1 - RealVector::Ones(12)).cwiseAbs().maxCoeff() < 1e-3);

  const MotionalState coh = coherent_state(std::polar(0.9, 0.4), d);
  const QuadratureEstimate est =
      quadrature_measure(coh, 0.4, drives, MeasurementPlan::exact(), 1e-2);
  CHECK(est.value - est.f1_bias == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(std::abs(est.f1_bias) < 1e-3);
}

TEST_CASE("first-order fits work on a shortened grid") {
  const InteractionHamiltonian h = build_carrier(DriveSet::carrier_single(0.3), 24);
  const MotionalState rho_f = thermal_state(0.3, 24);
  MeasurementPlan plan = MeasurementPlan::noiseless_fit();
  plan.fit_order = 1;
  plan.tau_grid = {0.005, 0.01, 0.015, 0.02};
  const SlopeEstimate est = estimate_slope(h, ProbeState(+1, kPi / 2), rho_f, plan);
  const double exact = analytic_slope(ProbeState(+1, kPi / 2), rho_f,
                                      DriveSet::carrier_single(0.3));
  CHECK(std::abs(est.value - exact) < 5e-3);
}

TEST_CASE("blue sideband measures the same quadrature") {
  const MeasurementPlan plan = MeasurementPlan::exact();
  const MotionalState coh = coherent_state(std::polar(0.8, 0.9), 32);
  const DriveSet red = DriveSet::sideband_single(DriveKind::red_sideband, 0.05);
  const DriveSet blue = DriveSet::sideband_single(DriveKind::blue_sideband, 0.05);
  for (double phi : {0.0, 0.7, 2.0}) {
    const QuadratureEstimate r = quadrature_measure(coh, phi, red, plan);
    const QuadratureEstimate b = quadrature_measure(coh, phi, blue, plan);
    CHECK(r.value - r.f1_bias == doctest::Approx(b.value - b.f1_bias).epsilon(1e-10));
  }
}
