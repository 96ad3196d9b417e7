#pragma once

#include <stdexcept>
#include <string>

namespace varscale {

// Malformed or invariant-violating input data (bad CSV row, non-positive
// price, duplicate date, ...). Carries a human-readable diagnostic.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A window estimator could not produce a usable value (optimizer did not
// converge, degenerate window). Rolling estimation catches this and
// carries the previous forecast forward.
class EstimationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace varscale
