#pragma once

#include <stdexcept>
#include <string>

namespace zds {

// Precondition / dimension-contract violations.
struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// Singular mass matrix, input matrix, or configuration outside the
// invertible operating range.
struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

// Ill-posed model definition (e.g. non-positive-definite mass matrix).
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite state during integration; carries the time stamp in the message.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
    double time;
};

// No guard crossing within the allowed phase duration.
struct StallError : std::runtime_error {
    explicit StallError(const std::string& what) : std::runtime_error(what) {}
};

// Guard event bracketing failed (no sign change, or several crossings in
// one integrator step).
struct DetectionError : std::runtime_error {
    explicit DetectionError(const std::string& what) : std::runtime_error(what) {}
};

struct TranscriptionError : std::invalid_argument {
    explicit TranscriptionError(const std::string& what) : std::invalid_argument(what) {}
};

struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

// Controller-side faults: failed nearest-trajectory lookup, pre-feedback
// singularities, clock out of range.
struct ControllerFault : std::runtime_error {
    explicit ControllerFault(const std::string& what) : std::runtime_error(what) {}
};

struct VerificationError : std::runtime_error {
    explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zds
