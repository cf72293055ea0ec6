#include "hmc/sampler.hpp"

#include <cmath>
#include <string>

#include "hmc/errors.hpp"
#include "hmc/parallel.hpp"
#include "hmc/tuning.hpp"

namespace hmc {

std::pair<Vector, TransitionRecord> hmc_transition(const TargetModel& model, Rng& rng,
                                                   const Vector& q, const IntegratorConfig& cfg,
                                                   double tau, double tau_jitter,
                                                   double divergence_threshold) {
    if (q.size() != model.dim) throw ContractViolation("hmc_transition: dimension mismatch");

    PhaseState z(q, sample_momentum(rng, model.dim));
    ProposalSummary prop =
        propose_summary(model, z, cfg, tau, tau_jitter, &rng, divergence_threshold);

    TransitionRecord rec;
    rec.divergent = prop.divergent;
    rec.n_steps = prop.n_steps;
    rec.step_size = cfg.step_size;
    rec.delta = hamiltonian_error(model, z, prop.final_state);
    rec.accept_prob = rec.divergent ? 0.0 : std::min(1.0, std::exp(rec.delta));

    // Always consume the acceptance uniform so the rng stream advances by the
    // same amount whether or not the proposal was viable.
    double u = rng.uniform();
    rec.accepted = u < rec.accept_prob;
    if (rec.accepted) return {prop.final_state.position, rec};
    return {q, rec};
}

ChainOutput run_chain(const TargetModel& model, const ChainConfig& config) {
    if (config.n_samples < 1) throw ContractViolation("run_chain: n_samples must be >= 1");
    if (config.n_warmup < 0) throw ContractViolation("run_chain: n_warmup must be >= 0");
    if (!(config.initial_step > 0.0))
        throw ContractViolation("run_chain: initial_step must be positive");

    Rng rng(config.seed);
    Vector q;
    if (config.initial_position) {
        q = *config.initial_position;
        if (q.size() != model.dim)
            throw ContractViolation("run_chain: initial position has wrong dimension");
        if (!q.allFinite()) throw DomainError("run_chain: non-finite initial position");
    } else if (config.init == ChainInit::exact) {
        if (!model.has_exact_sampler())
            throw UnsupportedOperation("run_chain: exact init needs an exact sampler");
        q = model.exact_position_sampler(rng);
    } else {
        q = Vector::Zero(model.dim);
    }

    const bool adapting = config.adapt.enabled && config.n_warmup > 0;
    DualAveragingState da;
    if (adapting)
        da = dual_averaging_init(config.initial_step, config.adapt.target, config.adapt.gamma,
                                 config.adapt.t0, config.adapt.kappa);

    ChainOutput out;
    out.records.reserve(static_cast<size_t>(config.n_warmup + config.n_samples));

    IntegratorConfig icfg{config.initial_step, config.scheme};
    for (long i = 0; i < config.n_warmup; ++i) {
        if (adapting) icfg.step_size = current_step(da);
        auto [q_next, rec] = hmc_transition(model, rng, q, icfg, config.tau, config.tau_jitter,
                                            config.divergence_threshold);
        q = std::move(q_next);
        if (adapting) da = adapt_step(da, rec.accept_prob);
        out.records.push_back(rec);
    }

    icfg.step_size = adapting ? averaged_step(da) : config.initial_step;
    out.adapted_step = icfg.step_size;

    out.draws.resize(config.n_samples, model.dim);
    for (long i = 0; i < config.n_samples; ++i) {
        auto [q_next, rec] = hmc_transition(model, rng, q, icfg, config.tau, config.tau_jitter,
                                            config.divergence_threshold);
        q = std::move(q_next);
        out.draws.row(i) = q;
        if (rec.divergent) ++out.n_divergent_sampling;
        out.records.push_back(rec);
    }
    return out;
}

std::vector<ChainOutput> run_chains(const TargetModel& model,
                                    const std::vector<ChainConfig>& configs,
                                    unsigned max_workers) {
    if (configs.empty()) throw ContractViolation("run_chains: need at least one config");
    std::vector<ChainOutput> outputs(configs.size());
    parallel_shards(
        configs.size(),
        [&](std::size_t i) {
            try {
                outputs[i] = run_chain(model, configs[i]);
            } catch (const ContractViolation& e) {
                throw ContractViolation("chain " + std::to_string(i) + ": " + e.what());
            } catch (const DomainError& e) {
                throw DomainError("chain " + std::to_string(i) + ": " + e.what());
            }
        },
        max_workers);
    return outputs;
}

}  // namespace hmc
