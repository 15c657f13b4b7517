#ifndef QJUMP_ERRORS_HPP
#define QJUMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qjump {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or precondition violation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// A finite bit budget or preassigned list cannot supply the next value.
/// Never silently zero-filled: bits beyond a budget are undefined.
class ExhaustionError : public Error {
public:
    explicit ExhaustionError(const std::string& what) : Error(what) {}
};

/// Probabilities do not sum to one within the configured tolerance.
class NormalizationError : public DomainError {
public:
    explicit NormalizationError(const std::string& what) : DomainError(what) {}
};

/// Malformed input document (manifest, trajectory, config).
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, long line = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

} // namespace qjump

#endif
