#pragma once

#include <stdexcept>
#include <string>

namespace supplab {

/// Raised when a call would push a session past its sample or query budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an argument is outside the documented domain of an operation.
class ParameterRange : public std::invalid_argument {
public:
    explicit ParameterRange(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an exact computation would exceed its guarded input size.
class ScaleExceeded : public std::runtime_error {
public:
    explicit ScaleExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a randomized search gives up within its attempt budget.
class ConstructionFailed : public std::runtime_error {
public:
    explicit ConstructionFailed(const std::string& what) : std::runtime_error(what) {}
};

} // namespace supplab
