#include "ionprobe/protocols.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace ionprobe {

namespace {

constexpr double kLeakageTol = 1e-8;

struct PinnedFit {
  double slope;
  double slope_stderr;
};

// Weighted least squares of y - p0 on {tau, tau^2, ..., tau^order} with the
// intercept pinned at the known p0. Weights come from the binomial variance
// model; for noiseless fits the covariance is rescaled by the residual
// variance so the stderr reflects model mismatch only.
PinnedFit pinned_polyfit(const std::vector<double>& taus, const std::vector<double>& y,
                         double p0, int order, const std::vector<double>* variances) {
  const int m = static_cast<int>(taus.size());
  Eigen::MatrixXd x(m, order);
  Eigen::VectorXd rhs(m), wts(m);
  for (int k = 0; k < m; ++k) {
    double tp = 1.0;
    for (int j = 0; j < order; ++j) {
      tp *= taus[k];
      x(k, j) = tp;
    }
    rhs(k) = y[k] - p0;
    wts(k) = variances ? 1.0 / (*variances)[k] : 1.0;
  }
  const Eigen::MatrixXd xtwx = x.transpose() * wts.asDiagonal() * x;
  const Eigen::VectorXd xtwy = x.transpose() * wts.asDiagonal() * rhs;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
  const Eigen::VectorXd beta = ldlt.solve(xtwy);
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(order, order));
  double var0 = cov(0, 0);
  if (!variances) {
    const Eigen::VectorXd resid = rhs - x * beta;
    const int dof = std::max(1, m - order);
    var0 *= resid.squaredNorm() / dof;
  }
  return {beta(0), std::sqrt(std::max(0.0, var0))};
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the combined key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> MeasurementPlan::default_grid() {
  std::vector<double> grid(8);
  const double lo = 0.01, hi = 0.15;
  for (int k = 0; k < 8; ++k)
    grid[k] = lo * std::pow(hi / lo, double(k) / 7.0);
  return grid;
}

MeasurementPlan MeasurementPlan::exact() {
  MeasurementPlan p;
  p.tau_grid = default_grid();
  p.method = SlopeMethod::exact_analytic;
  return p;
}

MeasurementPlan MeasurementPlan::noiseless_fit() {
  MeasurementPlan p;
  p.tau_grid = default_grid();
  p.method = SlopeMethod::fit_noiseless;
  return p;
}

MeasurementPlan MeasurementPlan::with_shots(int shots, std::uint64_t seed) {
  MeasurementPlan p;
  p.tau_grid = default_grid();
  p.method = SlopeMethod::fit_shots;
  p.shots_per_point = shots;
  p.seed = seed;
  return p;
}

void MeasurementPlan::validate() const {
  if (fit_order != 1 && fit_order != 2)
    throw std::domain_error("MeasurementPlan: fit_order must be 1 or 2");
  if (method == SlopeMethod::fit_shots && shots_per_point < 1)
    throw std::domain_error("MeasurementPlan: fit_shots requires shots_per_point >= 1");
  if (method == SlopeMethod::exact_analytic) return;
  if (static_cast<int>(tau_grid.size()) <= fit_order)
    throw std::domain_error("MeasurementPlan: grid has fewer points than the fit order needs");
  double prev = 0.0;
  for (double t : tau_grid) {
    if (!(t > prev))
      throw std::domain_error("MeasurementPlan: tau_grid must be increasing and positive");
    prev = t;
  }
  if (prev > 0.2)
    throw std::domain_error("MeasurementPlan: tau_grid max exceeds 0.2 (linear regime)");
}

SlopeEstimate estimate_slope(const InteractionHamiltonian& h, const ProbeState& probe,
                             const MotionalState& rho_f, const MeasurementPlan& plan) {
  plan.validate();
  if (leakage(rho_f, 2) > kLeakageTol)
    throw precision_error("estimate_slope: motional state fails the leakage check; "
                          "increase the truncation dimension");
  const HybridState rho0 = hybrid_product(probe, rho_f);
  if (h.matrix.rows() != rho0.matrix.rows())
    throw std::domain_error("estimate_slope: Hamiltonian/state dimension mismatch");

  if (plan.method == SlopeMethod::exact_analytic)
    return {ehrenfest_slope(rho0, h), 0.0, SlopeMethod::exact_analytic};

  const Propagator prop(h);
  const double p0 = excited_population(rho0);  // 1/2 for |±_phi> probes
  const int m = static_cast<int>(plan.tau_grid.size());
  std::vector<double> y(m);
  for (int k = 0; k < m; ++k)
    y[k] = excited_population(prop.evolve(rho0, plan.tau_grid[k]));

  if (plan.method == SlopeMethod::fit_noiseless) {
    const PinnedFit fit = pinned_polyfit(plan.tau_grid, y, p0, plan.fit_order, nullptr);
    return {fit.slope, fit.slope_stderr, SlopeMethod::fit_noiseless};
  }

  // Destructive-readout model: each grid point is an independent
  // binomial(shots, P_e) draw keyed by (seed, point index).
  const int shots = plan.shots_per_point;
  std::vector<double> sampled(m), variances(m);
  for (int k = 0; k < m; ++k) {
    std::mt19937_64 eng(mix_seed(plan.seed, std::uint64_t(k)));
    std::binomial_distribution<long> bin(shots, std::clamp(y[k], 0.0, 1.0));
    const double p_hat = double(bin(eng)) / shots;
    sampled[k] = p_hat;
    const double floor_p = 1.0 / double(shots + 2);
    const double p_var = std::clamp(p_hat, floor_p, 1.0 - floor_p);
    variances[k] = p_var * (1.0 - p_var) / shots;
  }
  const PinnedFit fit = pinned_polyfit(plan.tau_grid, sampled, p0, plan.fit_order, &variances);
  return {fit.slope, fit.slope_stderr, SlopeMethod::fit_shots};
}

std::pair<double, double> two_eta_invert_normalized(double g1, double x1,
                                                    double g2, double x2) {
  if (!(x1 > 0) || !(x2 > 0) || x1 == x2)
    throw singularity_error("two_eta inversion: etas must be distinct and positive");
  Eigen::Matrix2d a;
  a << -x1, x1 * x1 / 4.0, -x2, x2 * x2 / 4.0;
  Eigen::Vector2d b(g1 - 1.0, g2 - 1.0);
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(a);
  Eigen::Vector2d m = lu.solve(b);
  m += lu.solve(b - a * m);  // refinement: the system is tiny but skewed
  return {m(0), m(1) + m(0)};
}

std::pair<MomentEstimate, MomentEstimate> moments_two_eta(
    double f0_mean_1, double eta1, double f0_mean_2, double eta2,
    double stderr1, double stderr2) {
  if (eta1 == eta2)
    throw singularity_error("moments_two_eta: eta1 and eta2 must differ");
  if (!(eta1 > 0) || !(eta2 > 0))
    throw std::domain_error("moments_two_eta: etas must be > 0");
  const double x1 = eta1 * eta1, x2 = eta2 * eta2;
  // Divide out the known e^{-eta^2/2} so the quadratic model is exact
  // through eta^4 in the falling-factorial moments.
  const double n1 = std::exp(0.5 * x1), n2 = std::exp(0.5 * x2);
  const auto [m1, m2] = two_eta_invert_normalized(f0_mean_1 * n1, x1, f0_mean_2 * n2, x2);

  // Linear propagation through the same solve: d(m1, M2) = A^{-1} d(g).
  Eigen::Matrix2d a;
  a << -x1, x1 * x1 / 4.0, -x2, x2 * x2 / 4.0;
  const Eigen::Matrix2d ainv = a.inverse();
  const double sg1 = stderr1 * n1, sg2 = stderr2 * n2;
  const double var_m1 = ainv(0, 0) * ainv(0, 0) * sg1 * sg1 + ainv(0, 1) * ainv(0, 1) * sg2 * sg2;
  const double var_M2 = ainv(1, 0) * ainv(1, 0) * sg1 * sg1 + ainv(1, 1) * ainv(1, 1) * sg2 * sg2;
  const double cov = ainv(0, 0) * ainv(1, 0) * sg1 * sg1 + ainv(0, 1) * ainv(1, 1) * sg2 * sg2;
  const double var_m2 = var_M2 + var_m1 + 2.0 * cov;

  MomentEstimate first{1, m1, std::sqrt(std::max(0.0, var_m1)),
                       MomentEstimate::Route::two_eta};
  MomentEstimate second{2, m2, std::sqrt(std::max(0.0, var_m2)),
                        MomentEstimate::Route::two_eta};
  return {first, second};
}

FanoMandelEstimate fano_mandel(const MomentEstimate& n1, const MomentEstimate& n2) {
  if (!(n1.value > 0))
    throw std::domain_error("fano_mandel: <n> must be positive (vacuum has no Q)");
  const double q = (n2.value - n1.value * n1.value) / n1.value;
  const double d1 = -n2.value / (n1.value * n1.value) - 1.0;
  const double d2 = 1.0 / n1.value;
  const double var = d1 * d1 * n1.stderr_value * n1.stderr_value +
                     d2 * d2 * n2.stderr_value * n2.stderr_value;
  return {q, std::sqrt(std::max(0.0, var))};
}

MomentEstimate moment_engineered(const MotionalState& rho_f, int p,
                                 const std::vector<double>& etas,
                                 const MeasurementPlan& plan) {
  const int n_lasers = static_cast<int>(etas.size());
  if (p < 0 || p >= n_lasers)
    throw std::domain_error("moment_engineered: requires 0 <= p < number of lasers");
  const int d = rho_f.dim();

  EngineeringProblem problem;
  problem.etas = etas;
  problem.target.assign(n_lasers, 0.0);
  problem.target[p] = 1.0;
  const EngineeringSolution sol = solve_weights(problem, d);

  // Drive with the physical max-normalized ratios; the measured slope is
  // then <F0_raw>/scale and the estimate rescales by `scale`.
  const InteractionHamiltonian h = build_carrier(DriveSet::carrier(sol.omega_ratio, etas), d);
  const ProbeState probe(+1, std::numbers::pi / 2.0);
  const SlopeEstimate slope = estimate_slope(h, probe, rho_f, plan);
  const double value = -slope.value * sol.scale;

  MomentEstimate est{p, value, slope.stderr_value * sol.scale,
                     MomentEstimate::Route::engineered};
  est.stat_error = slope.stderr_value * sol.scale;

  // Population-weighted residual: covers |<F0_raw> - <n^p>| for exact slopes.
  const RealVector f0 = combined_diag(sol.raw_weights, etas, d, CouplingKind::f0);
  double resid = 0.0;
  for (int n = 0; n < d; ++n)
    resid += rho_f.matrix(n, n).real() * std::abs(f0(n) - std::pow(double(n), double(p)));
  est.residual_error = resid;
  est.truncation_error = leakage(rho_f, 2) * std::pow(double(d - 1), double(p));

  double eta_max = 0.0, moment_n = 0.0;
  for (double e : etas) eta_max = std::max(eta_max, e);
  moment_n = number_moment(rho_f, n_lasers);
  const double proxy = (moment_n > 0) ? std::pow(moment_n, 1.0 / n_lasers) : 0.0;
  est.series_tail_bound = residual_bound(n_lasers, eta_max, proxy, p);
  return est;
}

double generalized_quadrature_oracle(const MotionalState& rho_f,
                                     const RealVector& fdiag, double phi) {
  const int d = rho_f.dim();
  if (fdiag.size() != d)
    throw std::domain_error("generalized_quadrature_oracle: dimension mismatch");
  const Matrix a = lowering_operator(d);
  const Matrix fa = fdiag.cast<Complex>().asDiagonal() * a;
  const Matrix op = 0.5 * (fa * std::polar(1.0, -phi) + fa.adjoint() * std::polar(1.0, phi));
  return expect(rho_f, op).real();
}

QuadratureEstimate quadrature_measure(const MotionalState& rho_f, double phi,
                                      const DriveSet& drives, const MeasurementPlan& plan,
                                      double flatness_tol) {
  if (drives.kind == DriveKind::carrier)
    throw std::domain_error("quadrature_measure: needs a sideband drive set");
  const int d = rho_f.dim();
  RealVector f1;
  if (drives.time_convention == TimeConvention::eta_omega_l_half)
    f1 = f1_diag(drives.etas.at(0), d).values;
  else
    f1 = combined_diag(drives.weights, drives.etas, d, CouplingKind::f1);

  const bool ld_single = drives.time_convention == TimeConvention::eta_omega_l_half &&
                         drives.etas.at(0) <= 0.1;
  if (!ld_single) {
    double worst = 0.0;
    for (int n = 0; n < d; ++n)
      if (rho_f.matrix(n, n).real() > 1e-10)
        worst = std::max(worst, std::abs(f1(n) - 1.0));
    if (worst > flatness_tol)
      throw precision_error("quadrature_measure: |F1 - 1| = " + std::to_string(worst) +
                            " over populated levels exceeds the declared tolerance");
  }

  // Blue-sideband slopes see phi with the opposite sign; flip the probe
  // phase so the estimate targets <X_phi> for either kind.
  const double probe_phi = (drives.kind == DriveKind::red_sideband) ? phi : -phi;
  const ProbeState probe(+1, probe_phi);
  const InteractionHamiltonian h = build_sideband(drives, d);
  const SlopeEstimate slope = estimate_slope(h, probe, rho_f, plan);

  const double bias = generalized_quadrature_oracle(rho_f, f1, phi) -
                      generalized_quadrature_oracle(rho_f, RealVector::Ones(d), phi);
  return {slope.value, slope.stderr_value, bias, phi};
}

}  // namespace ionprobe
