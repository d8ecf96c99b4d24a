#pragma once

#include <stdexcept>
#include <string>

namespace orgsim {

/// Malformed or inconsistent configuration: unknown keys, missing fields,
/// mismatched models, references to metrics that do not exist.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible range. The message names the field
/// and the violated bound.
class RangeError : public ConfigError {
public:
    RangeError(const std::string& field, const std::string& bound, const std::string& got)
        : ConfigError("'" + field + "' must be in " + bound + " (got " + got + ")")
        , field_(field)
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A cell lies outside the grid.
class BoundsError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Harvest attempted on an exhausted food source.
class NoFood : public std::runtime_error {
public:
    NoFood()
        : std::runtime_error("food source is empty")
    {
    }
};

/// No route between two engineers; only possible on a corrupted topology.
class Unreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A statistical comparison needs at least two replications per side.
class InsufficientReplications : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace orgsim
