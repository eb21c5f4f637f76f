#include "ionprobe/couplings.hpp"

#include <cmath>
#include <string>

namespace ionprobe {

namespace {

void check_eta(double eta) {
  if (eta < 0 || !std::isfinite(eta))
    throw std::domain_error("coupling: eta must be finite and >= 0");
}

// Scaled Stirling-first-kind table S[m][p] = c(m,p)/m!^2 via
// S(m,p) = (S(m-1,p-1) + (m-1) S(m-1,p)) / m^2. All terms positive, so the
// recurrence is forward stable and never forms a factorial.
std::vector<std::vector<double>> scaled_stirling_table(int m_max, int p_max) {
  std::vector<std::vector<double>> s(m_max + 1, std::vector<double>(p_max + 1, 0.0));
  s[0][0] = 1.0;
  for (int m = 1; m <= m_max; ++m)
    for (int p = 0; p <= p_max; ++p) {
      const double prev = (p >= 1) ? s[m - 1][p - 1] : 0.0;
      s[m][p] = (prev + double(m - 1) * s[m - 1][p]) / (double(m) * double(m));
    }
  return s;
}

// Rigorous bound on the dropped inner tail: a_p^m <= m! gives
// a_p^m x^m / m!^2 <= x^m / m!, so the tail is below sum_{k>m} x^k/k!.
double inner_tail_bound(double x, int m_max) {
  double term = 1.0;
  for (int k = 1; k <= m_max + 1; ++k) term *= x / k;
  double sum = 0.0;
  int k = m_max + 1;
  while (term > 1e-300 && k < m_max + 400) {
    sum += term;
    ++k;
    term *= x / k;
  }
  return sum;
}

}  // namespace

CouplingDiag f0_diag(double eta, int d) {
  check_eta(eta);
  if (d < 1) throw std::domain_error("f0_diag: d must be >= 1");
  const double x = eta * eta;
  RealVector v(d);
  // g_n = e^{-x/2} L_n(x); the recurrence is linear, so the prefactor is
  // folded into the seeds.
  double g0 = std::exp(-0.5 * x);
  double g1 = g0 * (1.0 - x);
  v(0) = g0;
  if (d > 1) v(1) = g1;
  for (int n = 1; n + 1 < d; ++n) {
    const double g2 = ((2.0 * n + 1.0 - x) * g1 - double(n) * g0) / double(n + 1);
    v(n + 1) = g2;
    g0 = g1;
    g1 = g2;
  }
  return {std::move(v), eta, CouplingKind::f0};
}

CouplingDiag f1_diag(double eta, int d) {
  check_eta(eta);
  if (d < 1) throw std::domain_error("f1_diag: d must be >= 1");
  const double x = eta * eta;
  RealVector v(d);
  // w_n = e^{-x/2} L_n^1(x), then f1(n) = w_n/(n+1).
  double w0 = std::exp(-0.5 * x);
  double w1 = w0 * (2.0 - x);
  v(0) = w0;
  if (d > 1) v(1) = w1 / 2.0;
  for (int n = 1; n + 1 < d; ++n) {
    const double w2 = ((2.0 * n + 2.0 - x) * w1 - double(n + 1) * w0) / double(n + 1);
    v(n + 1) = w2 / double(n + 2);
    w0 = w1;
    w1 = w2;
  }
  return {std::move(v), eta, CouplingKind::f1};
}

CouplingDiag laguerre_oracle(double eta, int d, CouplingKind kind) {
  check_eta(eta);
  if (d < 1) throw std::domain_error("laguerre_oracle: d must be >= 1");
  const long double x = static_cast<long double>(eta) * eta;
  const long double alpha = (kind == CouplingKind::f0) ? 0.0L : 1.0L;
  const long double prefactor = std::exp(-x / 2.0L);
  RealVector v(d);
  long double l0 = 1.0L;
  long double l1 = 1.0L + alpha - x;
  for (int n = 0; n < d; ++n) {
    const long double ln = (n == 0) ? l0 : l1;
    const long double scaled =
        (kind == CouplingKind::f0) ? ln : ln / static_cast<long double>(n + 1);
    v(n) = static_cast<double>(prefactor * scaled);
    if (n >= 1) {
      const long double l2 =
          ((2.0L * n + 1.0L + alpha - x) * l1 - (n + alpha) * l0) / (n + 1.0L);
      l0 = l1;
      l1 = l2;
    }
  }
  return {std::move(v), eta, kind};
}

double coupling_series_reference(double eta, int n, CouplingKind kind) {
  check_eta(eta);
  if (n < 0 || n > 15)
    throw std::domain_error("coupling_series_reference: n must be in [0, 15]");
  const double x = eta * eta;
  double sum = 0.0;
  for (int l = 0; l <= n; ++l) {
    double term = 1.0;
    for (int k = 1; k <= l; ++k) term *= x / k;           // x^l / l!
    for (int k = 0; k < l; ++k) term *= double(n - k);    // n!/(n-l)!
    double denom = 1.0;                                   // remaining l! or (l+1)!
    if (kind == CouplingKind::f0)
      for (int k = 1; k <= l; ++k) denom *= k;
    else
      for (int k = 1; k <= l + 1; ++k) denom *= k;
    sum += ((l % 2 == 0) ? 1.0 : -1.0) * term / denom;
  }
  return std::exp(-0.5 * x) * sum;
}

std::uint64_t a_pm(int p, int m) {
  if (p < 1 || p > m) throw std::domain_error("a_pm: requires 1 <= p <= m");
  // c(k, q) = c(k-1, q-1) + (k-1) c(k-1, q), row by row.
  std::vector<std::uint64_t> row(m + 1, 0), next(m + 1, 0);
  row[1] = 1;  // c(1,1)
  for (int k = 2; k <= m; ++k) {
    std::fill(next.begin(), next.end(), 0);
    for (int q = 1; q <= k; ++q) {
      std::uint64_t scaled = 0, sum = 0;
      if (__builtin_mul_overflow(row[q], std::uint64_t(k - 1), &scaled) ||
          __builtin_add_overflow(row[q - 1], scaled, &sum))
        throw std::overflow_error("a_pm: value exceeds 64-bit integer range");
      next[q] = sum;
    }
    std::swap(row, next);
  }
  return row[p];
}

int default_m_max(double eta_max) {
  check_eta(eta_max);
  const double x = eta_max * eta_max;
  for (int m = 1; m <= 60; ++m)
    if (inner_tail_bound(x, m) < 1e-14) return m;
  return 60;
}

TaylorCoeffs taylor_coeffs(const std::vector<double>& weights,
                           const std::vector<double>& etas,
                           int p_max, int m_max) {
  if (weights.size() != etas.size() || weights.empty())
    throw std::domain_error("taylor_coeffs: weights and etas must have equal nonzero length");
  if (p_max < 0) throw std::domain_error("taylor_coeffs: p_max must be >= 0");
  double eta_max = 0.0;
  for (double e : etas) {
    check_eta(e);
    eta_max = std::max(eta_max, e);
  }
  if (m_max < 0) m_max = std::max(default_m_max(eta_max), p_max);
  if (m_max < p_max) throw std::domain_error("taylor_coeffs: m_max must be >= p_max");
  for (double e : etas)
    if (inner_tail_bound(e * e, m_max) >= 1e-14)
      throw precision_error("taylor_coeffs: inner-series tail above 1e-14 for eta = " +
                            std::to_string(e) + "; increase m_max");

  const auto s = scaled_stirling_table(m_max, p_max);
  RealVector c = RealVector::Zero(p_max + 1);
  for (std::size_t j = 0; j < etas.size(); ++j) {
    const double x = etas[j] * etas[j];
    const double wpref = weights[j] * std::exp(-0.5 * x);
    c(0) += wpref;
    std::vector<double> xm(m_max + 1);
    xm[0] = 1.0;
    for (int m = 1; m <= m_max; ++m) xm[m] = xm[m - 1] * x;
    for (int p = 1; p <= p_max; ++p) {
      double inner = 0.0;
      for (int m = p; m <= m_max; ++m) inner += s[m][p] * xm[m];
      c(p) += ((p % 2 == 0) ? 1.0 : -1.0) * wpref * inner;
    }
  }
  return {std::move(c), p_max, m_max};
}

RealVector combined_diag(const std::vector<double>& weights,
                         const std::vector<double>& etas,
                         int d, CouplingKind kind) {
  if (weights.size() != etas.size() || weights.empty())
    throw std::domain_error("combined_diag: weights and etas must have equal nonzero length");
  RealVector out = RealVector::Zero(d);
  for (std::size_t j = 0; j < etas.size(); ++j) {
    const CouplingDiag f =
        (kind == CouplingKind::f0) ? f0_diag(etas[j], d) : f1_diag(etas[j], d);
    out += weights[j] * f.values;
  }
  return out;
}

}  // namespace ionprobe
