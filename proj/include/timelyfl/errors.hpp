#pragma once

#include <stdexcept>
#include <string>

namespace timelyfl {

// Parameter or argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Index beyond a precomputed table.
class CapacityError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Malformed experiment configuration; carries the offending line when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace timelyfl
