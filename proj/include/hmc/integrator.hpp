#pragma once

#include <utility>
#include <vector>

#include "hmc/model.hpp"
#include "hmc/types.hpp"

namespace hmc {

enum class Scheme { leapfrog, yoshida4 };

// Order of the integrator's Hamiltonian error: 2 for leapfrog, 4 for yoshida4.
int scheme_order(Scheme scheme);

struct IntegratorConfig {
    double step_size = 0.1;
    Scheme scheme = Scheme::leapfrog;
};

struct Trajectory {
    std::vector<PhaseState> states;       // length n_steps + 1, including the start
    std::vector<double> energy_errors;    // H(z_t) - H(z_0); entry 0 is exactly 0
    int n_steps = 0;
    double tau_eff = 0.0;                 // n_steps * step_size
    bool divergent = false;
};

// Final state only, for hot loops that sample millions of trajectories.
struct ProposalSummary {
    PhaseState final_state;               // momentum already flipped
    int n_steps = 0;
    double tau_eff = 0.0;
    double max_energy_growth = 0.0;
    bool divergent = false;
};

constexpr double kDefaultDivergenceThreshold = 1000.0;  // nats of energy growth

// Number of leapfrog/yoshida4 steps for integration time tau: round half away
// from zero, never fewer than one step.
int step_count(double tau, double step_size);

// Integration time for this trajectory; jittered uniformly on
// [tau*(1-jitter), tau*(1+jitter)] when jitter > 0 (rng required then).
double effective_time(double tau, double jitter, Rng* rng);

PhaseState leapfrog_step(const TargetModel& model, const PhaseState& z, double step_size);
PhaseState yoshida4_step(const TargetModel& model, const PhaseState& z, double step_size);

Trajectory integrate(const TargetModel& model, const PhaseState& z0,
                     const IntegratorConfig& cfg, double tau, double tau_jitter = 0.0,
                     Rng* rng = nullptr,
                     double divergence_threshold = kDefaultDivergenceThreshold);

// The Metropolis proposal map: integrate for tau, then flip the momentum.
// Applying it twice returns the initial state up to floating-point roundoff.
std::pair<PhaseState, Trajectory> propose(const TargetModel& model, const PhaseState& z0,
                                          const IntegratorConfig& cfg, double tau,
                                          double tau_jitter = 0.0, Rng* rng = nullptr,
                                          double divergence_threshold = kDefaultDivergenceThreshold);

ProposalSummary propose_summary(const TargetModel& model, const PhaseState& z0,
                                const IntegratorConfig& cfg, double tau,
                                double tau_jitter = 0.0, Rng* rng = nullptr,
                                double divergence_threshold = kDefaultDivergenceThreshold);

// H(z) - H(z_prop).  The Metropolis acceptance probability is min(1, e^delta).
// Non-finite energies collapse to -infinity, i.e. certain rejection.
double hamiltonian_error(const TargetModel& model, const PhaseState& z,
                         const PhaseState& z_prop);

// Leading correction of the leapfrog shadow Hamiltonian for a unit metric:
// G = (2 |grad V|^2 - p^T (Hessian V) p) / 24.
double correction_G(const TargetModel& model, const PhaseState& z,
                    Scheme scheme = Scheme::leapfrog);

// Leading-order mean energy gain E[H(prop) - H] for the 1-D standard Gaussian
// under leapfrog at integration time tau: eps^4 (1 - cos 2 tau) / 64.
double analytic_mean_error_gaussian(double eps, double tau);

}  // namespace hmc
