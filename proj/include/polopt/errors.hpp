#pragma once

#include <stdexcept>
#include <string>

namespace polopt {

/// Base class for all polopt errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input data violates a documented invariant (bad probabilities, shapes, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// A linear system required by an exact solve is numerically singular.
struct SingularSystem : Error {
  using Error::Error;
};

/// The policy-induced chain is not irreducible and aperiodic.
struct NonErgodicChain : Error {
  using Error::Error;
};

/// pi_old assigns zero probability to an action pi_new supports.
struct UnsupportedAction : Error {
  using Error::Error;
};

/// An estimator was asked to aggregate over zero trajectories.
struct EmptyBatch : Error {
  using Error::Error;
};

/// Trust-region step is undefined because g^T W^+ g vanishes.
struct DegenerateGradient : Error {
  using Error::Error;
};

/// Closed-loop LQR dynamics are not contractive for the requested setup.
struct UnstableGains : Error {
  using Error::Error;
};

/// State covariance is singular, so the natural gradient is undefined.
struct SingularCovariance : Error {
  using Error::Error;
};

/// Exhaustive enumeration was requested beyond its size limit.
struct TooLarge : Error {
  using Error::Error;
};

/// A function evaluation produced NaN or infinity.
struct NonFiniteValue : Error {
  using Error::Error;
};

}  // namespace polopt
