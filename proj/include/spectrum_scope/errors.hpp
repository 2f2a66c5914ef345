/**
 * @file errors.hpp
 * @brief Exception types shared by every spectrum_scope module.
 *
 * The CLI maps each type onto a distinct exit code:
 * domain_error -> 2, resource_error -> 3, convergence_error -> 4.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spectrum_scope {

/// Invalid input: malformed frame, spectrum off the simplex, size mismatch.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented enumeration or oracle cap was exceeded.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of budget; carries the last iterate.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, std::vector<double> last_iterate)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    std::vector<double> last_iterate_;
};

}  // namespace spectrum_scope
