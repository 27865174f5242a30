#pragma once

#include <stdexcept>
#include <string>

namespace vieta {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularPointError : Error {
    using Error::Error;
};

struct FrameMismatchError : Error {
    using Error::Error;
};

struct NoCompactComponentError : Error {
    using Error::Error;
};

struct EnvelopeViolation : Error {
    using Error::Error;
};

struct NewtonDivergence : Error {
    using Error::Error;
};

struct NotNearInfinity : Error {
    using Error::Error;
};

struct IndeterminacyError : Error {
    using Error::Error;
};

struct EmptyReduction : Error {
    using Error::Error;
};

struct ToleranceCollision : Error {
    using Error::Error;
};

struct EscapeError : Error {
    using Error::Error;
};

struct OverflowGuard : Error {
    using Error::Error;
};

struct CertificateFailure : Error {
    using Error::Error;
};

struct ParabolicBoundary : Error {
    using Error::Error;
};

struct ConfigError : Error {
    ConfigError(int line_no, const std::string& what)
        : Error("config line " + std::to_string(line_no) + ": " + what), line(line_no) {}
    explicit ConfigError(const std::string& what) : Error(what), line(0) {}
    int line;
};

} // namespace vieta
