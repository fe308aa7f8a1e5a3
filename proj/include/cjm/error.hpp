#pragma once

#include <stdexcept>
#include <string>

namespace cjm {

/// Invalid grid, stencil, halo or experiment configuration.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Operands that cannot be combined (mismatched grids, lengths).
class UsageError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An iteration produced a non-finite value or blew past the growth guard.
class DivergenceError : public std::runtime_error {
   public:
    DivergenceError(const std::string& what, long iteration, double omega)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) +
                             ", omega " + std::to_string(omega) + ")"),
          iteration_(iteration),
          omega_(omega) {}

    long iteration() const noexcept { return iteration_; }
    double omega() const noexcept { return omega_; }

   private:
    long iteration_;
    double omega_;
};

}  // namespace cjm
