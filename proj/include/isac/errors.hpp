#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace isac {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Dimension or length mismatch between operands.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Seed matrix is rank deficient at the configured singular-value cutoff.
class ConditioningError : public std::runtime_error {
public:
    ConditioningError(const std::string& what, double sv_ratio)
        : std::runtime_error(what), sv_ratio_(sv_ratio) {}
    double singular_value_ratio() const noexcept { return sv_ratio_; }

private:
    double sv_ratio_;
};

/// A constraint set is empty. `stage` names the pipeline step that detected it,
/// `bound` carries the computed quantity that proves it (NaN when not applicable).
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string stage, const std::string& what, double bound = 0.0)
        : std::runtime_error(what), stage_(std::move(stage)), bound_(bound) {}
    const std::string& stage() const noexcept { return stage_; }
    double bound() const noexcept { return bound_; }

private:
    std::string stage_;
    double bound_;
};

/// Malformed configuration; `field` is the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace isac
