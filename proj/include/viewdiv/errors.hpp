#pragma once

#include <stdexcept>
#include <string>

namespace viewdiv {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input (bad JSON line, bad CSV, bad date string). Carries a
// location in the message where one is known.
struct ParseError : Error {
    using Error::Error;
};

// Structurally well-formed input that violates a documented invariant
// (duplicate ids, empty paragraph list, mismatched matrix ids).
struct ValidationError : Error {
    using Error::Error;
};

// Bad configuration: weights that do not sum to one, empty taxonomy,
// empty grid, k larger than the corpus.
struct ConfigError : Error {
    using Error::Error;
};

// A lookup that the caller promised would succeed did not: unknown
// article id, missing sidecar record, missing matrix entry.
struct LookupError : Error {
    using Error::Error;
};

} // namespace viewdiv
