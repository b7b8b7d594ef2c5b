#ifndef ELDNN_ERRORS_HPP
#define ELDNN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eldnn {

/// Shape disagreement between operands (matrix/vector dims, mask lengths).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside its admissible range (probabilities, holdout sizes, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative solver ran out of iterations; carries the last iterate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last)
        : std::runtime_error(what), last_estimate(last) {}
    double last_estimate;
};

/// Exhaustive mask enumeration would exceed the configuration cap.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file content; the message names the offending byte offset.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value produced where finiteness is required; carries the
/// layer index that produced it (or npos when not layer-specific).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what,
                          std::size_t layer = static_cast<std::size_t>(-1))
        : std::runtime_error(what), layer_index(layer) {}
    std::size_t layer_index;
};

} // namespace eldnn

#endif
