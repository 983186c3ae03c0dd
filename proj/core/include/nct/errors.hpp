#ifndef NCT_ERRORS_HPP
#define NCT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nct {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Misused API: bad arguments, violated preconditions, mismatched moduli.
struct UsageError : Error {
    using Error::Error;
};

struct SingularMatrixError : Error {
    using Error::Error;
};

// Random fixture generation exhausted its retry budget.
struct GenerationError : Error {
    using Error::Error;
};

// Observed data is outside the regime an algorithm is guaranteed for
// (sparse-decode failure, no candidate graph matches, unexplainable column).
struct ModelViolationError : Error {
    using Error::Error;
};

// A configured enumeration cap would be exceeded.
struct ScaleCapError : Error {
    using Error::Error;
};

// The requested confusion attack does not exist (trivial span intersection).
struct AttackInfeasibleError : Error {
    using Error::Error;
};

} // namespace nct

#endif
