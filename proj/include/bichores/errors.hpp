// Error taxonomy shared across the library. Input problems (parse, shape,
// value domain) and internal failures (budget/invariant monitors) are kept
// as distinct types so callers can map them to different exit paths.
#pragma once

#include <stdexcept>
#include <string>

namespace bichores {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instance construction / parsing.
struct ParseError : Error {
    using Error::Error;
};
struct NotBivalued : Error {
    using Error::Error;
};
struct DegenerateAllZero : Error {
    using Error::Error;
};

// Market / flow preconditions.
struct MalformedMarket : Error {
    using Error::Error;
};

// Solver self-checks. InternalBoundViolation fires when a step budget is
// exhausted (a non-termination bug); InvariantViolation fires when one of the
// runtime monitors observes a state the algorithm's analysis rules out.
struct InternalBoundViolation : Error {
    using Error::Error;
};
struct InvariantViolation : Error {
    using Error::Error;
};

// take_fractional_subset asked for more spending than the bundle holds.
struct InsufficientSpend : Error {
    using Error::Error;
};

// Brute-force enumeration would exceed the configured cap.
struct TooLarge : Error {
    using Error::Error;
};

} // namespace bichores
