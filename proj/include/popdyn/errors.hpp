#pragma once

#include <stdexcept>
#include <string>

namespace popdyn {

// Base class for all library failures so callers can catch popdyn::Error
// without distinguishing the specific kind.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A reaction rate evaluated to NaN/inf, or to a negative value below the
// roundoff clamp threshold.
struct NonFiniteRate : Error {
    using Error::Error;
};

// Gillespie requires N*x0 to be integral componentwise.
struct NonIntegerCounts : Error {
    using Error::Error;
};

// ODE state norm blew past the divergence guard.
struct StepDiverged : Error {
    using Error::Error;
};

// |det U(t)| fell below tolerance; U is no longer invertible.
struct SingularFundamental : Error {
    using Error::Error;
};

// Cholesky failed even at the jitter ceiling.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NonPositiveDiagonal : Error {
    using Error::Error;
};

// An Euler-Maruyama transition covariance has an exactly-zero diagonal
// entry (absorbing state); the transition is deterministic-degenerate.
struct DegenerateCovariance : Error {
    using Error::Error;
};

// MCMC acceptance collapsed (< 0.1% over 10k steps).
struct ChainDiverged : Error {
    using Error::Error;
};

// CSV ingestion failures carry the offending line number in the message.
struct MalformedRow : Error {
    using Error::Error;
};

struct NonMonotoneTime : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// A simulation path inside an ensemble failed; message includes the path index.
struct EnsembleError : Error {
    using Error::Error;
};

}  // namespace popdyn
