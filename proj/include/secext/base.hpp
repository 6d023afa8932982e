#pragma once

#include <stdexcept>
#include <string>

namespace secext {

/* Error taxonomy mirrored by the CLI exit codes:
   usage -> 1 (handled by the CLI parser), DataError -> 2,
   VerifyError -> 3, InconsistentError -> 4. */
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/* Malformed or mismatched input data: parse failures, degree mismatches,
   unknown generators, missing table entries. */
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

/* A computed structure failed one of its own checks (d∘d != 0, identity
   violation, exactness failure). */
struct VerifyError : Error {
    explicit VerifyError(const std::string& msg) : Error(msg) {}
};

/* The linear system for some generator has no solution; signals an invalid
   multiplication table (or an internal bug), and is a first-class outcome. */
struct InconsistentError : Error {
    explicit InconsistentError(const std::string& msg) : Error(msg) {}
};

}  // namespace secext
