#pragma once

#include <vector>

#include "ionprobe/couplings.hpp"

namespace ionprobe {

// Solve for N laser weights fixing the first N Taylor coefficients of the
// combined coupling to a target vector.
struct EngineeringProblem {
  std::vector<double> etas;    // strictly positive, pairwise distinct
  std::vector<double> target;  // t_p for p = 0..N-1
  int m_max = -1;              // -1: default_m_max over the etas
};

struct EngineeringSolution {
  std::vector<double> raw_weights;  // solve M w = target directly
  std::vector<double> omega_ratio;  // Omega_j/Omega_L, max |.| = 1
  double scale;                     // raw = omega_ratio * scale; the physical
                                    // coefficient vector is target/scale
  double condition_number;          // sigma_max/sigma_min of M
  RealVector residual_profile;      // |F0(n) - sum_p t_p n^p| over n
};

// M such that c = M w; row p holds each laser's contribution to c_p
// (row 0 = e^{-eta_j^2/2}). p_count is the number of rows p = 0..p_count-1.
Eigen::MatrixXd coefficient_matrix(const std::vector<double>& etas,
                                   int p_count, int m_max = -1);

// Dense solve with full pivoting plus one iterative-refinement step.
// condition_number > 1e12 raises conditioning_error with a respacing hint.
// profile_dim sets the length of residual_profile.
EngineeringSolution solve_weights(const EngineeringProblem& problem,
                                  int profile_dim = 32);

// e^{-eta_max^2/2} eta_max^{2N}/N!^2 * nbar_proxy^N: the expected size of
// the first uncontrolled series term. order_p is accepted for interface
// symmetry with the engineered-target order but does not enter the value.
double residual_bound(int n_lasers, double eta_max, double nbar_proxy, int order_p);

// max_{n < d - k_guard} |F0(n) - n^p| for a solution targeting the p-th
// monomial, evaluated from the raw weights.
double verify_monomial(const EngineeringSolution& solution,
                       const std::vector<double>& etas, int d, int p,
                       int k_guard = 2);

// Default placement helper: equispaced on [eta_max/N, eta_max].
std::vector<double> equispaced_etas(int n_lasers, double eta_max);

}  // namespace ionprobe
