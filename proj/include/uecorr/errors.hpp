// errors.hpp — Exception hierarchy shared by all uecorr modules.

#pragma once

#include <stdexcept>
#include <string>

namespace uecorr {

/// Coarse failure classes, used by the CLI to pick exit codes.
enum class ErrorCategory {
    Parse,     // malformed config/CSV/JSON text
    Io,        // missing, unreadable, or structurally broken files
    Numeric,   // domain and numerical failures (bad inputs, singular systems, ...)
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const char* kind, const std::string& msg)
        : std::runtime_error(msg), category_(category), kind_(kind) {}

    ErrorCategory category() const noexcept { return category_; }
    /// Stable machine-readable token, e.g. "SingularGram".
    const char* kind() const noexcept { return kind_; }

private:
    ErrorCategory category_;
    const char* kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg)
        : Error(ErrorCategory::Numeric, "InvalidInput", msg) {}
};

class OutOfBounds : public Error {
public:
    explicit OutOfBounds(const std::string& msg)
        : Error(ErrorCategory::Numeric, "OutOfBounds", msg) {}
};

/// Cholesky factorization of the Gram matrix failed; usually duplicate or
/// near-duplicate landmark positions, or a jitter too small to condition them.
class SingularGram : public Error {
public:
    explicit SingularGram(const std::string& msg)
        : Error(ErrorCategory::Numeric, "SingularGram", msg) {}
};

/// A statistic is undefined on the given sample (e.g. rank correlation of a
/// constant sample). Reported explicitly, never silently mapped to 0.
class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& msg)
        : Error(ErrorCategory::Numeric, "DegenerateInput", msg) {}
};

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& msg)
        : Error(ErrorCategory::Numeric, "ShapeMismatch", msg) {}
};

/// A held-out test position coincides with a training position.
class DisjointnessViolation : public Error {
public:
    explicit DisjointnessViolation(const std::string& msg)
        : Error(ErrorCategory::Numeric, "DisjointnessViolation", msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg)
        : Error(ErrorCategory::Io, "IoError", msg) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg)
        : Error(ErrorCategory::Parse, "ParseError", msg) {}
};

} // namespace uecorr
