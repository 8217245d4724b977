#pragma once

#include <stdexcept>
#include <string>

namespace hopnet {

// Argument outside the open range of the activation (the conjugate energy
// is +inf there), or a non-finite input where a finite one is required.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Rejected model parameters or configuration documents.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IntegrationError : public std::runtime_error {
public:
    enum class Kind { diverged, boundary };

    IntegrationError(Kind kind, const std::string& what, double time)
        : std::runtime_error(what), kind_(kind), time_(time) {}

    Kind kind() const noexcept { return kind_; }
    double time() const noexcept { return time_; }

private:
    Kind kind_;
    double time_;
};

}  // namespace hopnet
