#include "hmc/error_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmc/errors.hpp"
#include "hmc/parallel.hpp"
#include "hmc/rng.hpp"

namespace hmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

stats::MeanSe mean_and_se(const std::vector<double>& x) {
    stats::MeanSe out;
    out.value = stats::mean(x);
    out.se = std::sqrt(stats::sample_variance(x) / static_cast<double>(x.size()));
    return out;
}

}  // namespace

std::vector<double> ErrorSampleSet::finite_samples() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (double d : samples)
        if (std::isfinite(d)) out.push_back(d);
    return out;
}

ErrorSampleSet sample_errors(const TargetModel& model, std::uint64_t seed,
                             const IntegratorConfig& cfg, double tau, long n_draws,
                             const ErrorSamplingOptions& opts) {
    if (n_draws < 100) throw ContractViolation("sample_errors: need at least 100 draws");
    if (!model.has_exact_sampler())
        throw UnsupportedOperation("sample_errors: model has no exact position sampler");
    if (opts.shard_size < 1) throw ContractViolation("sample_errors: bad shard_size");

    ErrorSampleSet set;
    set.eps = cfg.step_size;
    set.tau = tau;
    set.order = scheme_order(cfg.scheme);
    set.samples.assign(static_cast<size_t>(n_draws), 0.0);

    const long shard_size = opts.shard_size;
    const size_t n_shards = static_cast<size_t>((n_draws + shard_size - 1) / shard_size);
    std::vector<long> shard_divergent(n_shards, 0);

    parallel_shards(
        n_shards,
        [&](size_t s) {
            Rng rng(derive_seed(seed, s));
            const long begin = static_cast<long>(s) * shard_size;
            const long end = std::min(n_draws, begin + shard_size);
            long divergent = 0;
            for (long i = begin; i < end; ++i) {
                PhaseState z = sample_exact(model, rng);
                ProposalSummary prop = propose_summary(model, z, cfg, tau, opts.tau_jitter,
                                                       &rng, opts.divergence_threshold);
                double delta = prop.divergent ? kNegInf
                                              : hamiltonian_error(model, z, prop.final_state);
                if (!std::isfinite(delta)) {
                    delta = kNegInf;
                    ++divergent;
                }
                set.samples[static_cast<size_t>(i)] = delta;
            }
            shard_divergent[s] = divergent;
        },
        opts.max_workers);

    for (long c : shard_divergent) set.n_divergent += c;
    return set;
}

stats::MeanSe moment(const ErrorSampleSet& set, int n) {
    if (n < 1 || n > 4) throw ContractViolation("moment: order must be in 1..4");
    std::vector<double> powered = set.finite_samples();
    if (powered.size() < 2)
        throw ContractViolation("moment: fewer than 2 non-divergent draws");
    for (double& d : powered) d = std::pow(d, n);
    return mean_and_se(powered);
}

CumulantSet cumulants(const ErrorSampleSet& set, int n_bootstrap, std::uint64_t bootstrap_seed) {
    std::vector<double> x = set.finite_samples();
    if (x.size() < 10) throw ContractViolation("cumulants: fewer than 10 non-divergent draws");
    if (n_bootstrap < 2) throw ContractViolation("cumulants: need at least 2 resamples");

    CumulantSet out;
    out.eps = set.eps;
    out.tau = set.tau;
    out.order = set.order;
    out.n = static_cast<long>(x.size());
    out.kappa = stats::k_statistics(x);
    out.kappa1_plus_half_kappa2 = out.kappa[0] + 0.5 * out.kappa[1];

    // One bootstrap pass feeds all five standard errors.
    const size_t nb = static_cast<size_t>(n_bootstrap);
    std::vector<std::array<double, 5>> boot(nb);
    parallel_shards(nb, [&](size_t r) {
        Rng rng(derive_seed(bootstrap_seed, r));
        std::vector<double> resample(x.size());
        for (size_t i = 0; i < x.size(); ++i) resample[i] = x[rng.integer(x.size())];
        auto k = stats::k_statistics(resample);
        boot[r] = {k[0], k[1], k[2], k[3], k[0] + 0.5 * k[1]};
    });
    std::vector<double> column(nb);
    for (int j = 0; j < 5; ++j) {
        for (size_t r = 0; r < nb; ++r) column[r] = boot[r][static_cast<size_t>(j)];
        double se = std::sqrt(stats::sample_variance(column));
        if (j < 4)
            out.kappa_se[static_cast<size_t>(j)] = se;
        else
            out.kappa1_plus_half_kappa2_se = se;
    }
    return out;
}

stats::MeanSe check_global_constraint(const ErrorSampleSet& set) {
    if (set.samples.size() < 2)
        throw ContractViolation("check_global_constraint: fewer than 2 draws");
    std::vector<double> expd(set.samples.size());
    for (size_t i = 0; i < set.samples.size(); ++i) expd[i] = std::exp(set.samples[i]);
    return mean_and_se(expd);
}

stats::MeanSe mean_acceptance(const ErrorSampleSet& set) {
    if (set.samples.size() < 2)
        throw ContractViolation("mean_acceptance: fewer than 2 draws");
    std::vector<double> acc(set.samples.size());
    for (size_t i = 0; i < set.samples.size(); ++i)
        acc[i] = std::min(1.0, std::exp(set.samples[i]));
    return mean_and_se(acc);
}

AlphaFit fit_alpha_from_kappa2(std::vector<double> eps_grid, std::vector<double> kappa2_values,
                               int k) {
    if (eps_grid.size() != kappa2_values.size())
        throw ContractViolation("fit_alpha: grid/value length mismatch");
    if (eps_grid.size() < 3) throw ContractViolation("fit_alpha: need at least 3 grid points");
    if (k != 2 && k != 4) throw ContractViolation("fit_alpha: integrator order must be 2 or 4");
    for (size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0)) throw ContractViolation("fit_alpha: eps must be positive");
        if (!(kappa2_values[i] > 0.0))
            throw ContractViolation("fit_alpha: kappa_2 must be positive");
    }
    std::vector<double> lx(eps_grid.size()), ly(eps_grid.size());
    for (size_t i = 0; i < eps_grid.size(); ++i) {
        lx[i] = std::log(eps_grid[i]);
        ly[i] = std::log(kappa2_values[i]);
    }
    auto fit = stats::fit_intercept(lx, ly, 2.0 * k);
    AlphaFit out;
    out.alpha = std::exp(fit.intercept);
    out.residual_rms = fit.residual_rms;
    out.k = k;
    out.eps_grid = std::move(eps_grid);
    out.kappa2_values = std::move(kappa2_values);
    return out;
}

AlphaFit fit_alpha(const TargetModel& model, std::uint64_t seed, Scheme scheme, double tau,
                   const std::vector<double>& eps_grid, long n_per_eps,
                   const ErrorSamplingOptions& opts) {
    if (eps_grid.size() < 3) throw ContractViolation("fit_alpha: need at least 3 grid points");
    std::vector<double> kappa2;
    kappa2.reserve(eps_grid.size());
    for (size_t i = 0; i < eps_grid.size(); ++i) {
        IntegratorConfig cfg{eps_grid[i], scheme};
        ErrorSampleSet set =
            sample_errors(model, derive_seed(seed, i), cfg, tau, n_per_eps, opts);
        double rate = static_cast<double>(set.n_divergent) / static_cast<double>(n_per_eps);
        if (rate > 1e-3)
            throw UnstableRegime(eps_grid[i],
                                 "fit_alpha: divergence rate " + std::to_string(rate) +
                                     " at eps = " + std::to_string(eps_grid[i]));
        kappa2.push_back(stats::k_statistics(set.finite_samples())[1]);
    }
    return fit_alpha_from_kappa2(eps_grid, std::move(kappa2), scheme_order(scheme));
}

stats::SlopeFit scaling_exponent(const std::vector<double>& eps_grid,
                                 const std::vector<stats::MeanSe>& moments) {
    if (eps_grid.size() != moments.size() || eps_grid.size() < 3)
        throw ContractViolation("scaling_exponent: need at least 3 matched grid points");
    std::vector<double> lx(eps_grid.size()), ly(eps_grid.size()), sigma(eps_grid.size());
    for (size_t i = 0; i < eps_grid.size(); ++i) {
        double a = std::abs(moments[i].value);
        if (a <= 2.0 * moments[i].se)
            throw InsufficientSignal(
                "scaling_exponent: moment at eps = " + std::to_string(eps_grid[i]) +
                " is indistinguishable from zero at 2 SE");
        lx[i] = std::log(eps_grid[i]);
        ly[i] = std::log(a);
        sigma[i] = moments[i].se / a;
    }
    return stats::fit_line(lx, ly, sigma);
}

SqueezeEstimate nested_squeeze(const TargetModel& model, std::uint64_t seed,
                               const IntegratorConfig& cfg, double tau, long n_outer,
                               long n_inner, const ErrorSamplingOptions& opts) {
    if (n_outer < 2 || n_inner < 1)
        throw ContractViolation("nested_squeeze: need n_outer >= 2 and n_inner >= 1");
    if (!model.has_exact_sampler())
        throw UnsupportedOperation("nested_squeeze: model has no exact position sampler");

    const size_t n_out = static_cast<size_t>(n_outer);
    std::vector<double> accept_flat(n_out * static_cast<size_t>(n_inner));
    std::vector<double> inv_conditional(n_out);

    parallel_shards(n_out, [&](size_t i) {
        Rng rng(derive_seed(seed, i));
        Vector q = model.exact_position_sampler(rng);
        double inner_sum = 0.0;
        for (long j = 0; j < n_inner; ++j) {
            PhaseState z(q, sample_momentum(rng, model.dim));
            ProposalSummary prop = propose_summary(model, z, cfg, tau, opts.tau_jitter, &rng,
                                                   opts.divergence_threshold);
            double delta =
                prop.divergent ? kNegInf : hamiltonian_error(model, z, prop.final_state);
            double a = std::min(1.0, std::exp(delta));
            accept_flat[i * static_cast<size_t>(n_inner) + static_cast<size_t>(j)] = a;
            inner_sum += a;
        }
        double inner_mean = inner_sum / static_cast<double>(n_inner);
        inv_conditional[i] = inner_mean > 0.0
                                 ? 1.0 / inner_mean
                                 : std::numeric_limits<double>::infinity();
    }, opts.max_workers);

    SqueezeEstimate out;
    stats::MeanSe acc = mean_and_se(accept_flat);
    out.inverse_mean_accept.value = 1.0 / acc.value;
    out.inverse_mean_accept.se = acc.se / (acc.value * acc.value);  // delta method
    out.mean_inverse_conditional = mean_and_se(inv_conditional);

    std::vector<double> inv(accept_flat.size());
    for (size_t i = 0; i < accept_flat.size(); ++i)
        inv[i] = accept_flat[i] > 0.0 ? 1.0 / accept_flat[i]
                                      : std::numeric_limits<double>::infinity();
    out.mean_inverse_accept = mean_and_se(inv);
    return out;
}

}  // namespace hmc
