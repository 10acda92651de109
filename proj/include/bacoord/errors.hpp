#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bacoord {

/// Root of every error raised by the library. Catch this to handle all of them.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- rational calculus ----------------------------------------------------

class PoleEvaluation : public Error {
public:
    using Error::Error;
};

class InfiniteValue : public Error {
public:
    using Error::Error;
};

class NotAPole : public Error {
public:
    using Error::Error;
};

class WrongVanishingOrder : public Error {
public:
    using Error::Error;
};

// ---- spectral data ---------------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

/// A type invariant was violated. `rule()` names the invariant.
class InvariantError : public Error {
public:
    InvariantError(std::string rule, const std::string& detail)
        : Error(rule + ": " + detail), rule_(std::move(rule)) {}

    const std::string& rule() const noexcept { return rule_; }

private:
    std::string rule_;
};

class UnboundParameter : public Error {
public:
    using Error::Error;
};

class NoConstraint : public Error {
public:
    using Error::Error;
};

/// Raised when a solved parameter fails the remaining conditions. The value is still reported.
class Inconsistent : public Error {
public:
    Inconsistent(const std::string& what, std::complex<double> value, double residual)
        : Error(what), value_(value), residual_(residual) {}

    std::complex<double> value() const noexcept { return value_; }
    double residual() const noexcept { return residual_; }

private:
    std::complex<double> value_;
    double residual_;
};

// ---- Baker-Akhiezer solver --------------------------------------------------

class EssentialAtConstraint : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, double rcond) : Error(what), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// Raised when ψ is evaluated at an essential point; use the leading coefficient instead.
class EssentialPointError : public Error {
public:
    using Error::Error;
};

class InvolutionMismatch : public Error {
public:
    using Error::Error;
};

// ---- verification -----------------------------------------------------------

class NoTau : public Error {
public:
    using Error::Error;
};

class NotEgorovShape : public Error {
public:
    using Error::Error;
};

class ZeroLame : public Error {
public:
    using Error::Error;
};

}  // namespace bacoord
