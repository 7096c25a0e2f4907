#pragma once

#include <stdexcept>
#include <string>

namespace minkflow {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Support-function validation.
struct NonPositiveError : Error { using Error::Error; };
struct NonConvexError : Error { using Error::Error; };
struct BadGridError : Error { using Error::Error; };
// Radial-angle map lost monotonicity (non-convex input escaped validation).
struct WindingError : Error { using Error::Error; };

// Meshing and PDE solve.
struct MeshFailure : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct DegenerateGradient : Error { using Error::Error; };

// Perturbation families and flow control.
struct NonConvexPerturbation : Error { using Error::Error; };
struct GuardViolation : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Internal control flow of the time stepper: the caller halves dt and retries.
struct StepRejected : Error { using Error::Error; };

}  // namespace minkflow
