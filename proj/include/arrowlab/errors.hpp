#pragma once

#include <stdexcept>
#include <string>

namespace arrowlab {

/// Simulation state violates a structural invariant (overlap, out of table,
/// non-finite values). Never resolved silently.
struct CorruptStateError : std::runtime_error {
    explicit CorruptStateError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called outside its precondition (receding pair handed to
/// a collision resolver, mismatched disk counts, ...).
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Config text failed to parse or validate; `field` names the offending key.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(const std::string& field_, const std::string& what)
        : std::runtime_error(field_.empty() ? what : field_ + ": " + what), field(field_) {}
};

}  // namespace arrowlab
