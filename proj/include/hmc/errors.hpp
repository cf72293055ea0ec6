#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hmc {

// Caller broke a precondition (mismatched sizes, bad arguments, ...).
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct UnsupportedOperation : std::logic_error {
    using std::logic_error::logic_error;
};

// A scan or fit hit a step-size regime where the integrator diverges.
struct UnstableRegime : std::runtime_error {
    double eps;
    explicit UnstableRegime(double eps_, const std::string& what)
        : std::runtime_error(what), eps(eps_) {}
};

// Estimates too noisy to support the requested inference.
struct InsufficientSignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// robust_target_search ran out of targets; carries the per-target trace.
struct TargetExhaustion : std::runtime_error {
    std::vector<std::pair<double, long>> trace;  // (target, divergence count)
    TargetExhaustion(std::vector<std::pair<double, long>> tr, const std::string& what)
        : std::runtime_error(what), trace(std::move(tr)) {}
};

}  // namespace hmc
