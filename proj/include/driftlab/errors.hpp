#pragma once

#include <stdexcept>
#include <string>

namespace driftlab {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A state or action contained non-finite components.
struct InvalidState : Error {
    using Error::Error;
};

/// Two sequences that must be aligned (same length / same episodes) are not.
struct InvalidPair : Error {
    using Error::Error;
};

/// Function argument outside its mathematical domain.
struct DomainError : Error {
    using Error::Error;
};

/// Malformed or inconsistent configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Operation not defined for the requested variant.
struct Unsupported : Error {
    using Error::Error;
};

/// Instructed object missing from the scene.
struct GroundingError : Error {
    using Error::Error;
};

/// No frame satisfies the onset distance threshold.
struct NoKeyframe : Error {
    using Error::Error;
};

/// Simulation state became non-finite.
struct SimulationDiverged : Error {
    using Error::Error;
};

/// Input too short for the requested numerical operation.
struct InsufficientData : Error {
    using Error::Error;
};

/// An ensemble slot has no contributing prediction.
struct MissingPrediction : Error {
    using Error::Error;
};

/// File could not be parsed; message names the offending line.
struct FormatError : Error {
    using Error::Error;
};

}  // namespace driftlab
