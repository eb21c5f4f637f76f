#pragma once

#include <stdexcept>
#include <string>

namespace ionprobe {

// Error taxonomy shared across modules. Plain argument violations use
// std::domain_error; the types below are the cases callers (and the CLI
// exit-code mapping) dispatch on.

// A requested tolerance or internal truncation bound cannot be met.
struct precision_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A linear system is singular by construction (duplicate etas, rank loss).
struct singularity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A linear system is numerically unusable (condition number too large).
struct conditioning_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation would exceed a configured size cap.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inputs are mutually incompatible (e.g. moments inconsistent with the
// assumed support).
struct inconsistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ionprobe
