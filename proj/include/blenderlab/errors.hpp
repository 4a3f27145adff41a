#pragma once

#include <stdexcept>
#include <string>

namespace blenderlab {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Jet/interval shape and arithmetic errors.
struct ShapeError : Error {
    using Error::Error;
};
struct SingularIntervalError : Error {
    using Error::Error;
};

// Evaluation outside a declared domain. Carries the failing stage so word
// evaluation can report which branch broke the chain.
struct DomainError : Error {
    std::string stage;
    DomainError(const std::string& stage_, const std::string& msg)
        : Error(msg), stage(stage_) {}
};

struct ConfigError : Error {
    using Error::Error;
};

// Newton / solver failures.
struct NotConvergedError : Error {
    using Error::Error;
};
struct DegenerateJacobianError : Error {
    using Error::Error;
};
struct ResonanceError : Error {
    using Error::Error;
};
struct UnsupportedFlavorError : Error {
    using Error::Error;
};

// Search failures carrying the best value reached before the cap.
struct SearchExhaustedError : Error {
    double best_distance;
    SearchExhaustedError(const std::string& msg, double best)
        : Error(msg), best_distance(best) {}
};

struct InfeasiblePlanError : Error {
    std::string violated;
    InfeasiblePlanError(const std::string& violated_, const std::string& msg)
        : Error(msg), violated(violated_) {}
};

struct PreconditionError : Error {
    using Error::Error;
};

}  // namespace blenderlab
