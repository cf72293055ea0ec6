#pragma once

#include <vector>

#include "hmc/integrator.hpp"
#include "hmc/model.hpp"
#include "hmc/sampler.hpp"

namespace hmc {

struct DivergencePolicy {
    double energy_threshold = kDefaultDivergenceThreshold;  // nats of energy growth
};

// True iff any step grew the energy past the threshold or produced a
// non-finite state or energy.
bool detect_divergence(const Trajectory& traj, const DivergencePolicy& policy = {});

struct RhatResult {
    double rhat = 0.0;
    int n_chains_used = 0;       // half-chains entering the variance ratio
    long n_draws_per_half = 0;
};

// Classical split potential-scale-reduction factor: each chain is halved,
// then rhat = sqrt(((n-1)/n W + B/n) / W) over the half-chains.  Chains are
// truncated to the shortest length.
RhatResult split_rhat(const std::vector<std::vector<double>>& chains);

// split_rhat with n_exact_chains pseudo-chains of independent exact draws
// appended, each weighted like an ordinary chain.
RhatResult rhat_with_exact(const std::vector<std::vector<double>>& mcmc_chains,
                           const std::vector<double>& exact_draws, int n_exact_chains = 1);

struct ScanRow {
    double target = 0.0;
    double achieved_accept = 0.0;
    double step_size = 0.0;      // mean adapted step across chains
    long n_divergent = 0;        // divergent sampling transitions, all chains
    double rhat_v = 0.0;
};

struct ScanOptions {
    long n_chains = 4;
    long n_warmup = 1000;
    long n_samples = 2000;
    int scan_coordinate = 0;     // coordinate tracked by rhat_v
    int n_exact_chains = 1;      // pseudo-chains when the model has an exact sampler
    unsigned max_workers = 0;
};

// For each target: adapt the step size toward it, run n_chains chains, and
// record acceptance, divergence count, and rhat of the scanned coordinate
// (augmented with exact draws when the model supports them).
std::vector<ScanRow> divergence_scan(const TargetModel& model,
                                     const std::vector<double>& targets,
                                     const ChainConfig& base, const ScanOptions& opts = {});

}  // namespace hmc
