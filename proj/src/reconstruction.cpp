#include "ionprobe/reconstruction.hpp"

#include <cmath>
#include <string>

namespace ionprobe {

namespace {

double int_pow(int n, int p) {
  double acc = 1.0;
  for (int k = 0; k < p; ++k) acc *= n;
  return acc;  // 0^0 = 1
}

}  // namespace

DistributionEstimate moments_to_distribution(const MomentVector& moments, int support,
                                             double neg_tol_base) {
  const int size = static_cast<int>(moments.values.size());
  if (support != size)
    throw std::domain_error("moments_to_distribution: support size must equal moment count");
  if (size < 1) throw std::domain_error("moments_to_distribution: empty moment vector");
  if (std::abs(moments.values(0) - 1.0) > 1e-9)
    throw std::domain_error("moments_to_distribution: zeroth moment must be 1 within 1e-9");
  if (support > 13)
    throw conditioning_error("moments_to_distribution: support K > 12 is factorially "
                             "ill-conditioned; refusing");

  Eigen::MatrixXd v(size, size);
  for (int p = 0; p < size; ++p)
    for (int n = 0; n < size; ++n) v(p, n) = int_pow(n, p);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const double cond = svd.singularValues()(0) / svd.singularValues()(size - 1);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  Eigen::VectorXd p = lu.solve(moments.values);
  p += lu.solve(moments.values - v * p);

  const double tol = neg_tol_base * std::max(1.0, cond);
  double most_negative = 0.0;
  for (int n = 0; n < size; ++n) most_negative = std::min(most_negative, p(n));
  if (most_negative < -tol)
    throw inconsistency_error("moments_to_distribution: entry " + std::to_string(most_negative) +
                              " below -" + std::to_string(tol) +
                              "; moments incompatible with the assumed support");
  DistributionEstimate est;
  est.condition_number = cond;
  est.negativity = -most_negative;
  est.probs = p.cwiseMax(0.0);
  est.probs /= est.probs.sum();
  return est;
}

MomentVector distribution_to_moments(const RealVector& probs, int p_max) {
  if (p_max < 0) throw std::domain_error("distribution_to_moments: p_max must be >= 0");
  double sum = 0.0;
  for (int n = 0; n < probs.size(); ++n) {
    if (probs(n) < -1e-12)
      throw std::domain_error("distribution_to_moments: negative probability");
    sum += probs(n);
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::domain_error("distribution_to_moments: probabilities must sum to 1 within 1e-10");
  MomentVector m;
  m.values.resize(p_max + 1);
  for (int p = 0; p <= p_max; ++p) {
    double acc = 0.0;
    for (int n = 0; n < probs.size(); ++n) acc += int_pow(n, p) * probs(n);
    m.values(p) = acc;
  }
  return m;
}

}  // namespace ionprobe
