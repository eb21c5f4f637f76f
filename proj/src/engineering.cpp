#include "ionprobe/engineering.hpp"

#include <cmath>
#include <string>

namespace ionprobe {

namespace {

void check_etas(const std::vector<double>& etas) {
  if (etas.empty()) throw std::domain_error("engineering: etas must be nonempty");
  for (double e : etas)
    if (!(e > 0) || !std::isfinite(e))
      throw std::domain_error("engineering: etas must be strictly positive");
  for (std::size_t i = 0; i < etas.size(); ++i)
    for (std::size_t j = i + 1; j < etas.size(); ++j)
      if (std::abs(etas[i] - etas[j]) <= 1e-12 * std::max(etas[i], etas[j]))
        throw singularity_error("engineering: equal etas make the system singular (eta = " +
                                std::to_string(etas[i]) + ")");
}

double target_polynomial(const std::vector<double>& target, double n) {
  double acc = 0.0, np = 1.0;
  for (double t : target) {
    acc += t * np;
    np *= n;
  }
  return acc;
}

}  // namespace

Eigen::MatrixXd coefficient_matrix(const std::vector<double>& etas,
                                   int p_count, int m_max) {
  check_etas(etas);
  if (p_count < 1) throw std::domain_error("coefficient_matrix: p_count must be >= 1");
  const int n = static_cast<int>(etas.size());
  Eigen::MatrixXd m(p_count, n);
  for (int j = 0; j < n; ++j) {
    const TaylorCoeffs tc = taylor_coeffs({1.0}, {etas[j]}, p_count - 1, m_max);
    m.col(j) = tc.c;
  }
  return m;
}

EngineeringSolution solve_weights(const EngineeringProblem& problem, int profile_dim) {
  check_etas(problem.etas);
  const int n = static_cast<int>(problem.etas.size());
  if (static_cast<int>(problem.target.size()) != n)
    throw std::domain_error("solve_weights: target length must equal the number of etas");
  if (profile_dim < 1) throw std::domain_error("solve_weights: profile_dim must be >= 1");

  const Eigen::MatrixXd m = coefficient_matrix(problem.etas, n, problem.m_max);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double sigma_max = svd.singularValues()(0);
  const double sigma_min = svd.singularValues()(n - 1);
  if (sigma_min <= 0)
    throw singularity_error("solve_weights: coefficient matrix is singular");
  const double cond = sigma_max / sigma_min;
  if (cond > 1e12)
    throw conditioning_error("solve_weights: condition number " + std::to_string(cond) +
                             " exceeds 1e12; respace the etas further apart");

  Eigen::Map<const Eigen::VectorXd> t(problem.target.data(), n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  Eigen::VectorXd w = lu.solve(t);
  w += lu.solve(t - m * w);  // one refinement step

  EngineeringSolution sol;
  sol.raw_weights.assign(w.data(), w.data() + n);
  sol.condition_number = cond;
  sol.scale = w.cwiseAbs().maxCoeff();
  sol.omega_ratio.resize(n);
  for (int j = 0; j < n; ++j)
    sol.omega_ratio[j] = (sol.scale > 0) ? w(j) / sol.scale : 0.0;

  const RealVector f0 = combined_diag(sol.raw_weights, problem.etas, profile_dim,
                                      CouplingKind::f0);
  sol.residual_profile.resize(profile_dim);
  for (int i = 0; i < profile_dim; ++i)
    sol.residual_profile(i) = std::abs(f0(i) - target_polynomial(problem.target, double(i)));
  return sol;
}

double residual_bound(int n_lasers, double eta_max, double nbar_proxy, int order_p) {
  (void)order_p;
  if (n_lasers < 1) throw std::domain_error("residual_bound: n_lasers must be >= 1");
  if (eta_max < 0) throw std::domain_error("residual_bound: eta_max must be >= 0");
  const double x = eta_max * eta_max;
  double term = std::exp(-0.5 * x);
  for (int k = 1; k <= n_lasers; ++k) term *= x / (double(k) * double(k));
  return term * std::pow(nbar_proxy, double(n_lasers));
}

double verify_monomial(const EngineeringSolution& solution,
                       const std::vector<double>& etas, int d, int p, int k_guard) {
  if (d <= k_guard) throw std::domain_error("verify_monomial: d must exceed k_guard");
  const RealVector f0 = combined_diag(solution.raw_weights, etas, d, CouplingKind::f0);
  double worst = 0.0;
  for (int n = 0; n < d - k_guard; ++n)
    worst = std::max(worst, std::abs(f0(n) - std::pow(double(n), double(p))));
  return worst;
}

std::vector<double> equispaced_etas(int n_lasers, double eta_max) {
  if (n_lasers < 1) throw std::domain_error("equispaced_etas: n_lasers must be >= 1");
  if (!(eta_max > 0)) throw std::domain_error("equispaced_etas: eta_max must be > 0");
  std::vector<double> etas(n_lasers);
  for (int j = 0; j < n_lasers; ++j)
    etas[j] = eta_max * double(j + 1) / double(n_lasers);
  return etas;
}

}  // namespace ionprobe
