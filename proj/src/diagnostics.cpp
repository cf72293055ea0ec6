#include "hmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "hmc/errors.hpp"
#include "hmc/stats.hpp"

namespace hmc {

bool detect_divergence(const Trajectory& traj, const DivergencePolicy& policy) {
    if (traj.energy_errors.empty())
        throw ContractViolation("detect_divergence: trajectory has no energy errors");
    if (!(policy.energy_threshold > 0.0))
        throw ContractViolation("detect_divergence: threshold must be positive");
    for (const PhaseState& s : traj.states)
        if (!s.finite()) return true;
    for (double e : traj.energy_errors) {
        if (!std::isfinite(e)) return true;
        if (e > policy.energy_threshold) return true;
    }
    return false;
}

namespace {

RhatResult rhat_of_halves(const std::vector<std::vector<double>>& chains) {
    const size_t n_min = std::min_element(chains.begin(), chains.end(),
                                          [](const auto& a, const auto& b) {
                                              return a.size() < b.size();
                                          })
                             ->size();
    if (n_min < 4) throw ContractViolation("split_rhat: every chain needs >= 4 draws");
    const long half = static_cast<long>(n_min / 2);

    std::vector<double> means, variances;
    means.reserve(2 * chains.size());
    variances.reserve(2 * chains.size());
    for (const auto& chain : chains) {
        for (int part = 0; part < 2; ++part) {
            std::span<const double> h(chain.data() + part * half, static_cast<size_t>(half));
            means.push_back(stats::mean(h));
            variances.push_back(stats::sample_variance(h));
        }
    }

    double w = stats::mean(variances);
    if (!(w > 0.0))
        throw DegenerateVariance("split_rhat: zero within-chain variance in every half");
    double n = static_cast<double>(half);
    double b = n * stats::sample_variance(means);
    RhatResult out;
    out.rhat = std::sqrt((w * (n - 1.0) / n + b / n) / w);
    out.n_chains_used = static_cast<int>(2 * chains.size());
    out.n_draws_per_half = half;
    return out;
}

}  // namespace

RhatResult split_rhat(const std::vector<std::vector<double>>& chains) {
    if (chains.size() < 2) throw ContractViolation("split_rhat: need at least 2 chains");
    return rhat_of_halves(chains);
}

RhatResult rhat_with_exact(const std::vector<std::vector<double>>& mcmc_chains,
                           const std::vector<double>& exact_draws, int n_exact_chains) {
    if (mcmc_chains.empty()) throw ContractViolation("rhat_with_exact: need mcmc chains");
    if (n_exact_chains < 1)
        throw ContractViolation("rhat_with_exact: need at least one exact pseudo-chain");
    size_t n_min = mcmc_chains.front().size();
    for (const auto& c : mcmc_chains) n_min = std::min(n_min, c.size());
    if (exact_draws.size() < static_cast<size_t>(n_exact_chains) * n_min)
        throw ContractViolation("rhat_with_exact: not enough exact draws");

    std::vector<std::vector<double>> all = mcmc_chains;
    for (int c = 0; c < n_exact_chains; ++c)
        all.emplace_back(exact_draws.begin() + static_cast<long>(c * n_min),
                         exact_draws.begin() + static_cast<long>((c + 1) * n_min));
    return rhat_of_halves(all);
}

std::vector<ScanRow> divergence_scan(const TargetModel& model,
                                     const std::vector<double>& targets,
                                     const ChainConfig& base, const ScanOptions& opts) {
    if (targets.empty()) throw ContractViolation("divergence_scan: empty target list");
    for (size_t i = 0; i < targets.size(); ++i) {
        if (!(targets[i] > 0.0 && targets[i] < 1.0))
            throw ContractViolation("divergence_scan: targets must lie in (0, 1)");
        if (i > 0 && targets[i] <= targets[i - 1])
            throw ContractViolation("divergence_scan: targets must be strictly ascending");
    }
    if (opts.n_chains < 2) throw ContractViolation("divergence_scan: need >= 2 chains");
    if (opts.n_samples < 4 || opts.n_warmup < 0)
        throw ContractViolation("divergence_scan: bad chain lengths");
    if (opts.scan_coordinate < 0 || opts.scan_coordinate >= model.dim)
        throw ContractViolation("divergence_scan: scan coordinate out of range");

    std::vector<ScanRow> rows;
    rows.reserve(targets.size());
    for (size_t j = 0; j < targets.size(); ++j) {
        std::vector<ChainConfig> configs(static_cast<size_t>(opts.n_chains), base);
        for (long c = 0; c < opts.n_chains; ++c) {
            ChainConfig& cfg = configs[static_cast<size_t>(c)];
            cfg.seed = derive_seed(derive_seed(base.seed, j), static_cast<std::uint64_t>(c));
            cfg.n_warmup = opts.n_warmup;
            cfg.n_samples = opts.n_samples;
            cfg.adapt.enabled = true;
            cfg.adapt.target = targets[j];
        }
        std::vector<ChainOutput> outs = run_chains(model, configs, opts.max_workers);

        ScanRow row;
        row.target = targets[j];
        double accept_sum = 0.0, step_sum = 0.0;
        std::vector<std::vector<double>> coord_chains;
        coord_chains.reserve(outs.size());
        for (const ChainOutput& out : outs) {
            for (long i = 0; i < opts.n_samples; ++i)
                accept_sum += out.records[static_cast<size_t>(opts.n_warmup + i)].accept_prob;
            step_sum += out.adapted_step;
            row.n_divergent += out.n_divergent_sampling;
            const auto col = out.draws.col(opts.scan_coordinate);
            coord_chains.emplace_back(col.begin(), col.end());
        }
        row.achieved_accept =
            accept_sum / static_cast<double>(opts.n_chains * opts.n_samples);
        row.step_size = step_sum / static_cast<double>(opts.n_chains);

        if (model.has_exact_sampler()) {
            Rng rng(derive_seed(derive_seed(base.seed, j), 0x45584143u));  // exact-draw stream
            std::vector<double> exact(static_cast<size_t>(opts.n_exact_chains) *
                                      static_cast<size_t>(opts.n_samples));
            for (double& v : exact)
                v = model.exact_position_sampler(rng)[opts.scan_coordinate];
            row.rhat_v = rhat_with_exact(coord_chains, exact, opts.n_exact_chains).rhat;
        } else {
            row.rhat_v = split_rhat(coord_chains).rhat;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hmc
