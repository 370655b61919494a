#ifndef TREEDG_ERRORS_HPP
#define TREEDG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace treedg {

// Error classes map to CLI exit codes: configuration = 2, divergence = 3,
// capacity = 4. Anything else is a plain runtime_error (exit 1).

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when the solution leaves the admissible set: non-finite values,
// non-positive density/pressure inside a flux, or a limiter that cannot
// recover an element whose mean is already inadmissible.
class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

class CapacityError : public std::runtime_error {
public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace treedg

#endif
