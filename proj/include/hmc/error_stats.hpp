#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hmc/integrator.hpp"
#include "hmc/model.hpp"
#include "hmc/stats.hpp"

namespace hmc {

// Hamiltonian-error draws from exact canonical samples at one (eps, tau).
// Divergent draws are stored as -infinity sentinels; they are excluded from
// moment and cumulant arithmetic but kept in acceptance-style expectations,
// where a divergence is simply an acceptance probability of zero.
struct ErrorSampleSet {
    double eps = 0.0;
    double tau = 0.0;
    int order = 2;
    std::vector<double> samples;
    long n_divergent = 0;

    std::vector<double> finite_samples() const;
};

struct ErrorSamplingOptions {
    double tau_jitter = 0.0;
    double divergence_threshold = kDefaultDivergenceThreshold;
    long shard_size = 32768;  // draws per deterministic shard
    unsigned max_workers = 0;
};

// n_draws independent (exact draw -> proposal -> error) samples.  Shard s uses
// the generator seeded by derive_seed(seed, s); shards are concatenated in
// order, so the output is a pure function of the seed.
ErrorSampleSet sample_errors(const TargetModel& model, std::uint64_t seed,
                             const IntegratorConfig& cfg, double tau, long n_draws,
                             const ErrorSamplingOptions& opts = {});

// Plug-in estimate of E[delta^n] over non-divergent draws, SE = sd / sqrt(N).
stats::MeanSe moment(const ErrorSampleSet& set, int n);

struct CumulantSet {
    double eps = 0.0;
    double tau = 0.0;
    int order = 2;
    long n = 0;
    std::array<double, 4> kappa{};
    std::array<double, 4> kappa_se{};
    // The pair identity kappa_1 = -kappa_2/2 is the quantity of interest, so
    // the combination gets its own bootstrap SE (the terms are correlated).
    double kappa1_plus_half_kappa2 = 0.0;
    double kappa1_plus_half_kappa2_se = 0.0;
};

CumulantSet cumulants(const ErrorSampleSet& set, int n_bootstrap = 200,
                      std::uint64_t bootstrap_seed = 0);

// Estimate of E[e^delta], which is exactly 1 for any step size.  Divergent
// draws enter as e^{-inf} = 0.
stats::MeanSe check_global_constraint(const ErrorSampleSet& set);

// Estimate of the average Metropolis acceptance E[min(1, e^delta)].
stats::MeanSe mean_acceptance(const ErrorSampleSet& set);

struct AlphaFit {
    double alpha = 0.0;
    double residual_rms = 0.0;
    int k = 2;
    std::vector<double> eps_grid;
    std::vector<double> kappa2_values;
};

// Intercept-only fit of log kappa_2 = log alpha + 2k log eps.
AlphaFit fit_alpha_from_kappa2(std::vector<double> eps_grid,
                               std::vector<double> kappa2_values, int k);

// Sampling front end: estimates kappa_2 on the grid, then fits.  A grid point
// with more than 0.1% divergent draws aborts with UnstableRegime.
AlphaFit fit_alpha(const TargetModel& model, std::uint64_t seed, Scheme scheme, double tau,
                   const std::vector<double>& eps_grid, long n_per_eps,
                   const ErrorSamplingOptions& opts = {});

// Log-log slope of |moment| against eps with SE propagated from the moment
// SEs.  Any moment indistinguishable from zero at 2 SE aborts: the slope
// would be fit to noise.
stats::SlopeFit scaling_exponent(const std::vector<double>& eps_grid,
                                 const std::vector<stats::MeanSe>& moments);

struct SqueezeEstimate {
    stats::MeanSe inverse_mean_accept;       // 1 / E[a]
    stats::MeanSe mean_inverse_conditional;  // E_q[ 1 / E_p[a | q] ]
    stats::MeanSe mean_inverse_accept;       // E[1 / a]
};

// Nested Monte Carlo for the acceptance-probability sandwich: n_outer exact
// positions, n_inner fresh momenta per position.
SqueezeEstimate nested_squeeze(const TargetModel& model, std::uint64_t seed,
                               const IntegratorConfig& cfg, double tau, long n_outer,
                               long n_inner, const ErrorSamplingOptions& opts = {});

}  // namespace hmc
