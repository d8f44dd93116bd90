#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bolab {

/// Raised when an eigensolver fails to meet its residual target.
/// Carries the final residual norms so callers can report them.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> residuals = {})
        : std::runtime_error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Invalid run configuration. `field` is the dotted JSON path of the
/// offending entry (or "line:col" for syntax errors).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace bolab
