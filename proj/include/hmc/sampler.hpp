#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hmc/integrator.hpp"
#include "hmc/model.hpp"

namespace hmc {

struct TransitionRecord {
    bool accepted = false;
    double delta = 0.0;        // H(start) - H(proposal); -inf when the energy blew up
    double accept_prob = 0.0;  // min(1, e^delta), forced to 0 on divergence
    bool divergent = false;
    int n_steps = 0;
    double step_size = 0.0;
};

struct AdaptOptions {
    bool enabled = false;
    double target = 0.8;
    double gamma = 0.05;
    double t0 = 10.0;
    double kappa = 0.75;
};

// Where a chain starts when no explicit initial position is given.
enum class ChainInit { zeros, exact };

struct ChainConfig {
    std::uint64_t seed = 1;
    long n_warmup = 1000;
    long n_samples = 1000;
    double initial_step = 0.1;
    Scheme scheme = Scheme::leapfrog;
    double tau = 1.0;
    double tau_jitter = 0.0;
    double divergence_threshold = kDefaultDivergenceThreshold;
    AdaptOptions adapt;
    ChainInit init = ChainInit::zeros;
    std::optional<Vector> initial_position;  // wins over init when set
};

struct ChainOutput {
    Eigen::MatrixXd draws;                  // n_samples x dim, warmup discarded
    std::vector<TransitionRecord> records;  // warmup and sampling, in order
    double adapted_step = 0.0;
    long n_divergent_sampling = 0;
};

// One transition: fresh Gaussian momentum, integrate-and-flip proposal,
// Metropolis accept with probability min(1, e^delta).  Divergent proposals are
// rejected outright.  On rejection the returned position is the input, bit for
// bit.  Consumes a fixed number of rng draws per call (dim + jitter + 1).
std::pair<Vector, TransitionRecord> hmc_transition(const TargetModel& model, Rng& rng,
                                                   const Vector& q, const IntegratorConfig& cfg,
                                                   double tau, double tau_jitter = 0.0,
                                                   double divergence_threshold =
                                                       kDefaultDivergenceThreshold);

// Warmup (with optional dual-averaging step adaptation), then sampling at the
// frozen step size.  Output is a pure function of the config.
ChainOutput run_chain(const TargetModel& model, const ChainConfig& config);

// Chains run independently, possibly in parallel; outputs are in config order
// and identical for every worker count.
std::vector<ChainOutput> run_chains(const TargetModel& model,
                                    const std::vector<ChainConfig>& configs,
                                    unsigned max_workers = 0);

}  // namespace hmc
