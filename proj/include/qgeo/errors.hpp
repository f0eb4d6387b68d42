#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qgeo {

// Thrown when an operation hits a numerical limit of its domain (rank loss,
// degenerate spectra, rank-deficient metric bases, ...). Carries the name of
// the emitting operation so front ends can report it.
class NumericsError : public std::runtime_error {
public:
    NumericsError(std::string operation, const std::string& message)
        : std::runtime_error(operation + ": " + message),
          operation_(std::move(operation)) {}

    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

// Thrown on malformed configuration input; carries the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace qgeo
