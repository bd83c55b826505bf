#pragma once

#include <stdexcept>
#include <string>

namespace lindyn {

// Invalid hyperparameters, malformed configs, operations called outside
// their domain (e.g. closed form with beta != 1).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

// Dynamics provably stationary from this initialization: nothing to solve.
struct frozen_dynamics_error : std::runtime_error {
    explicit frozen_dynamics_error(const std::string& msg)
        : std::runtime_error("frozen dynamics: " + msg) {}
};

// Adaptive integrator step size underflowed; carries the time it happened.
struct stiffness_error : std::runtime_error {
    stiffness_error(const std::string& msg, double t_fail)
        : std::runtime_error("stiff: " + msg + " (t = " + std::to_string(t_fail) + ")"),
          t(t_fail) {}
    double t;
};

// A reduced-coordinate query left the monotone branch of its neuron
// (sign change through zero, or crossing sqrt(-c) when c < 0).
struct branch_error : std::runtime_error {
    explicit branch_error(const std::string& msg) : std::runtime_error("branch: " + msg) {}
};

}  // namespace lindyn
