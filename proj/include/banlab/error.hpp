#pragma once

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace banlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. `line` is 1-based (0 when the input is a single
/// string), `column` is 0-based.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column)
        : Error(format(message, line, column)), line_(line), column_(column), detail_(std::move(message)) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& detail() const { return detail_; }

private:
    static std::string format(const std::string& message, std::size_t line, std::size_t column) {
        if (line == 0) {
            return "parse error at position " + std::to_string(column) + ": " + message;
        }
        return "parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
               message;
    }

    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Raised when a run breaks one of the modelling hypotheses it was asked to
/// respect (e.g. two delays tie where no simultaneity is allowed).
class HypothesisViolation : public Error {
public:
    HypothesisViolation(std::string message, std::vector<std::size_t> automata)
        : Error(std::move(message)), automata_(std::move(automata)) {}

    const std::vector<std::size_t>& automata() const { return automata_; }

private:
    std::vector<std::size_t> automata_;
};

/// Size caps for operations that enumerate all 2^n configurations.
struct Limits {
    std::size_t exhaustive_cap = 20;
    std::size_t multigraph_cap = 12;

    /// Defaults, with `BANLAB_MAX_N` overriding the exhaustive cap.
    static Limits from_environment() {
        Limits limits;
        if (const char* value = std::getenv("BANLAB_MAX_N"); value != nullptr && *value != '\0') {
            char* end = nullptr;
            const unsigned long parsed = std::strtoul(value, &end, 10);
            if (end == nullptr || *end != '\0' || parsed == 0 || parsed > 30) {
                throw Error("BANLAB_MAX_N must be an integer in [1, 30], got '" + std::string(value) + "'");
            }
            limits.exhaustive_cap = parsed;
        }
        return limits;
    }
};

inline void require_exhaustive(std::size_t n, std::size_t cap, const char* what) {
    if (n > cap) {
        throw CapacityError(std::string(what) + ": network size " + std::to_string(n) +
                            " exceeds the exhaustive cap of " + std::to_string(cap));
    }
}

}  // namespace banlab
