#pragma once

#include <stdexcept>
#include <string>

namespace grushinlab {

// Base for all library errors so callers can catch everything from this project at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument or state: out-of-domain evaluation point, malformed grid, bad config.
struct DomainError : Error {
    using Error::Error;
};

// Evaluation requested on or too close to the singular set Z = {f = 0}.
struct SingularityError : Error {
    using Error::Error;
};

// Inconsistent run parameters (step sizes, horizons, resolutions).
struct ParameterError : Error {
    using Error::Error;
};

// Input outside the supported catalog of potentials / profiles.
struct UnsupportedError : Error {
    using Error::Error;
};

// A numerical verdict could not be reached within the pinned quality thresholds.
// Reported, never guessed around.
struct InconclusiveError : Error {
    using Error::Error;
};

} // namespace grushinlab
