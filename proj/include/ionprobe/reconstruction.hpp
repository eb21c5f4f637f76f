#pragma once

#include "ionprobe/fock.hpp"

namespace ionprobe {

struct MomentVector {
  RealVector values;  // m_p for p = 0..K; values[0] must be 1 within 1e-9
};

struct DistributionEstimate {
  RealVector probs;         // over n = 0..K, clipped and renormalized
  double condition_number;  // of the transposed Vandermonde system
  double negativity;        // magnitude of the most negative raw entry
};

// Solve sum_n n^p p(n) = m_p on the bounded support {0..K}. Entries in
// (-tol, 0) are clipped to zero and the vector renormalized, with the raw
// negativity recorded; entries below -tol raise inconsistency_error. The
// tolerance is neg_tol_base scaled by the condition number. Supports with
// K > 12 are refused (conditioning_error) rather than returning garbage.
DistributionEstimate moments_to_distribution(const MomentVector& moments, int support,
                                             double neg_tol_base = 1e-6);

// Round-trip oracle: m_p = sum_n n^p p(n) for a valid distribution.
MomentVector distribution_to_moments(const RealVector& probs, int p_max);

}  // namespace ionprobe
