#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ionprobe/dynamics.hpp"
#include "ionprobe/engineering.hpp"

namespace ionprobe {

enum class SlopeMethod { exact_analytic, fit_noiseless, fit_shots };

// How a slope is estimated from the simulated experiment. "exact" plans skip
// sampling entirely and return the analytic tau = 0 derivative; fit plans
// simulate P_e on the grid (binomial-sampled when shots are finite) and fit
// a polynomial in tau whose intercept is pinned at the exact P_e(0).
struct MeasurementPlan {
  std::vector<double> tau_grid;  // increasing, positive, max <= 0.2
  SlopeMethod method = SlopeMethod::exact_analytic;
  int shots_per_point = 0;       // >= 1 required for fit_shots
  std::uint64_t seed = 0;
  int fit_order = 2;             // 1 or 2

  static std::vector<double> default_grid();  // 8 geometric points 0.01..0.15
  static MeasurementPlan exact();
  static MeasurementPlan noiseless_fit();
  static MeasurementPlan with_shots(int shots, std::uint64_t seed);
  void validate() const;
};

struct SlopeEstimate {
  double value;
  double stderr_value;  // 0 exactly for exact_analytic
  SlopeMethod method;
};

struct MomentEstimate {
  enum class Route { two_eta, engineered, oracle };
  int p;
  double value;
  double stderr_value;
  Route route;
  // Labeled error-budget parts (engineered route).
  double stat_error = 0.0;        // fit stderr, rescaled
  double residual_error = 0.0;    // population-weighted engineering residual
  double truncation_error = 0.0;  // Fock-leakage tail allowance
  double series_tail_bound = 0.0;  // analytic series-tail estimate
  double budget() const { return stat_error + residual_error + truncation_error; }
};

// Simulate, sample and fit (or return the analytic derivative) for the
// probe (x) rho_f initial state under h. Requires leakage(rho_f, 2) < 1e-8.
SlopeEstimate estimate_slope(const InteractionHamiltonian& h, const ProbeState& probe,
                             const MotionalState& rho_f, const MeasurementPlan& plan);

// Pure linear-algebra layer of the two-eta inversion: solve
//   1 - x_i m1 + (x_i^2/4) M2 = g_i   (x_i = eta_i^2)
// for the pair (m1, M2) and return (<n>, <n^2>) = (m1, M2 + m1). Inputs g_i
// are prefactor-normalized means <L_n(x_i)>; feeding the truncated quadratic
// model itself recovers the pair exactly.
std::pair<double, double> two_eta_invert_normalized(double g1, double x1,
                                                    double g2, double x2);

// Full operation on raw measured means <f0(n; eta_i)>: divides out
// e^{-eta_i^2/2}, solves, converts, and propagates the input stderrs
// linearly. Returns (<n>, <n^2>) estimates.
std::pair<MomentEstimate, MomentEstimate> moments_two_eta(
    double f0_mean_1, double eta1, double f0_mean_2, double eta2,
    double stderr1 = 0.0, double stderr2 = 0.0);

struct FanoMandelEstimate {
  double q;
  double stderr_value;
};

// Q = (<n^2> - <n>^2)/<n> with first-order error propagation (inputs treated
// as uncorrelated). <n> <= 0 raises domain_error: vacuum has no Q.
FanoMandelEstimate fano_mandel(const MomentEstimate& n1, const MomentEstimate& n2);

// Engineer F0 = n^p with one laser per eta, measure the slope at
// phi = pi/2, and rescale by the engineering normalization. The returned
// estimate carries the three labeled error-budget parts.
MomentEstimate moment_engineered(const MotionalState& rho_f, int p,
                                 const std::vector<double>& etas,
                                 const MeasurementPlan& plan);

struct QuadratureEstimate {
  double value;  // sign-corrected slope = <X_phi> up to the F1 bias
  double stderr_value;
  double f1_bias;  // oracle-computed exact bias <GQ(F1)> - <GQ(1)>
  double phi;
};

// Generalized-quadrature measurement with a sideband drive set. Preflight:
// max_n |F1(n) - 1| over populated levels must stay below flatness_tol,
// except for a single-laser LD drive with eta <= 0.1.
QuadratureEstimate quadrature_measure(const MotionalState& rho_f, double phi,
                                      const DriveSet& drives, const MeasurementPlan& plan,
                                      double flatness_tol = 0.05);

// Direct trace of (1/2)(F a e^{-i phi} + a' F e^{i phi}): the ground truth
// for every sideband slope test.
double generalized_quadrature_oracle(const MotionalState& rho_f,
                                     const RealVector& fdiag, double phi);

// Counter-based reseeding: a per-point engine key, deterministic and
// order-independent across parallel evaluation.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ionprobe
