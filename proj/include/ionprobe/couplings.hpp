#pragma once

#include <cstdint>
#include <vector>

#include "ionprobe/fock.hpp"

namespace ionprobe {

enum class CouplingKind { f0, f1 };

// Fock-basis diagonal of a nonlinear coupling function:
//   f0(n; eta) = e^{-eta^2/2} L_n(eta^2)          (carrier)
//   f1(n; eta) = e^{-eta^2/2} L_n^1(eta^2)/(n+1)  (first sideband)
// Both are matrix elements of a unitary displacement, so |values| <= 1.
struct CouplingDiag {
  RealVector values;
  double eta;
  CouplingKind kind;
};

// Production path: scaled three-term Laguerre recurrence with the
// e^{-eta^2/2} prefactor folded in from the start. Accurate to 1e-10
// relative for n <= 200, eta <= 3.
CouplingDiag f0_diag(double eta, int d);
CouplingDiag f1_diag(double eta, int d);

// Independent cross-check route: unscaled Laguerre recurrence in long
// double, prefactor applied at the end. Agreement contract with the
// production path: 1e-10 relative with a 1e-12 absolute floor.
CouplingDiag laguerre_oracle(double eta, int d, CouplingKind kind);

// Literal truncated series (term-by-term falling-factorial sum), kept as a
// slow reference for n <= 15 only; raw factorials overflow beyond that.
double coupling_series_reference(double eta, int n, CouplingKind kind);

// Unsigned Stirling number of the first kind c(m, p), i.e. the elementary
// symmetric polynomial e_{m-p}(1..m-1); a_p^m = 1 when p = m. Exact integer
// arithmetic; throws std::overflow_error past the uint64 range (m > 21).
std::uint64_t a_pm(int p, int m);

// Taylor coefficients of the combined coupling F0 = sum_j w_j f0(n; eta_j)
// as a power series in n: F0(n) = sum_p c_p n^p.
struct TaylorCoeffs {
  RealVector c;  // p = 0..p_max
  int p_max;
  int m_max;
};

// Smallest inner truncation order whose rigorous dropped-tail bound
// sum_{k>m} eta^{2k}/k! falls below 1e-14, capped at 60.
int default_m_max(double eta_max);

// c[0] = sum_j w_j e^{-eta_j^2/2};
// c[p] = (-1)^p sum_j w_j e^{-eta_j^2/2} sum_{m=p}^{m_max} a_p^m eta_j^{2m}/m!^2.
// Inner coefficients a_p^m/m!^2 are computed by a scaled Stirling recurrence
// so no factorial is ever formed. m_max = -1 selects default_m_max; a tail
// bound above 1e-14 raises precision_error naming the offending eta.
TaylorCoeffs taylor_coeffs(const std::vector<double>& weights,
                           const std::vector<double>& etas,
                           int p_max, int m_max = -1);

// Pointwise sum_j w_j f_kind(n; eta_j) over n = 0..d-1. For kind f1 the
// weights are the effective u_j = w_j eta_j of the multi-laser sideband
// combination (the caller premultiplies; see dynamics::DriveSet).
RealVector combined_diag(const std::vector<double>& weights,
                         const std::vector<double>& etas,
                         int d, CouplingKind kind);

}  // namespace ionprobe
