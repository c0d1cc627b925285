#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lapi {

/// Bad arguments: dimension mismatches, out-of-range indices, nonpositive parameters.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition of one of the convergence results does not hold.
/// `assumption()` is the number of the violated assumption (1-7).
class AssumptionViolation : public std::runtime_error {
public:
    AssumptionViolation(int assumption, const std::string& detail)
        : std::runtime_error("Assumption " + std::to_string(assumption) + " violated: " + detail),
          assumption_(assumption) {}

    int assumption() const noexcept { return assumption_; }

private:
    int assumption_;
};

/// Inputs outside the domain where a closed-form expression is defined (H < 2 in the bounds).
class UnsupportedInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computation that would be too large to carry out (e.g. exhaustive policy enumeration).
class SizeLimitExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Malformed text input. `line()` is 1-based; 0 means "not tied to a line".
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& detail, const std::string& source = {})
        : std::runtime_error(compose(line, detail, source)), line_(line), detail_(detail) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

    /// Same error, prefixed with the file it came from.
    ParseError in_file(const std::string& source) const { return ParseError(line_, detail_, source); }

private:
    static std::string compose(std::size_t line, const std::string& detail, const std::string& source) {
        std::string s = source.empty() ? std::string() : source + ": ";
        if (line) s += "line " + std::to_string(line) + ": ";
        return s + detail;
    }

    std::size_t line_;
    std::string detail_;
};

}  // namespace lapi
