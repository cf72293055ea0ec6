#include "hmc/tuning.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hmc/errors.hpp"
#include "hmc/stats.hpp"

namespace hmc {

namespace {

void check_model(const AcceptanceModel& m) {
    if (!(m.alpha > 0.0)) throw ContractViolation("acceptance model: alpha must be positive");
    if (m.k != 2 && m.k != 4) throw ContractViolation("acceptance model: k must be 2 or 4");
}

void check_order(int k) {
    if (k != 2 && k != 4) throw ContractViolation("cost bound: k must be 2 or 4");
}

void check_acceptance(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("acceptance must lie in (0, 1)");
}

// Shared core of expected_inverse_acceptance and cost_upper: the value of
// E[1/a] as a function of s = sqrt(alpha/2) eps^k, computed as
// Phi(-s) + exp(log Phi(3s) + 4 s^2) with overflow saturation.
double expected_inverse_from_s(double s) {
    double log_tail = std::log(stats::normal_cdf(3.0 * s)) + 4.0 * s * s;
    if (log_tail > 700.0) return std::numeric_limits<double>::infinity();
    return stats::normal_cdf(-s) + std::exp(log_tail);
}

}  // namespace

double acceptance_curve(const AcceptanceModel& m, double eps) {
    check_model(m);
    if (!(eps >= 0.0)) throw DomainError("acceptance_curve: eps must be >= 0");
    double s = std::sqrt(m.alpha / 2.0) * std::pow(eps, m.k);
    return 2.0 * stats::normal_cdf(-s);
}

double epsilon_for_acceptance(const AcceptanceModel& m, double a) {
    check_model(m);
    check_acceptance(a);
    double s = stats::normal_quantile(1.0 - a / 2.0);
    return std::pow(std::sqrt(2.0 / m.alpha) * s, 1.0 / m.k);
}

double expected_inverse_acceptance(const AcceptanceModel& m, double eps) {
    check_model(m);
    if (!(eps >= 0.0)) throw DomainError("expected_inverse_acceptance: eps must be >= 0");
    double s = std::sqrt(m.alpha / 2.0) * std::pow(eps, m.k);
    return expected_inverse_from_s(s);
}

double cost_lower(double a, int k) {
    check_order(k);
    check_acceptance(a);
    double s = stats::normal_quantile(1.0 - a / 2.0);
    return 1.0 / (a * std::pow(s, 1.0 / k));
}

double cost_upper(double a, int k) {
    check_order(k);
    check_acceptance(a);
    double s = stats::normal_quantile(1.0 - a / 2.0);
    return expected_inverse_from_s(s) / std::pow(s, 1.0 / k);
}

double cost_lower_scaled(double a, const AcceptanceModel& m) {
    check_model(m);
    return std::pow(m.alpha / 2.0, 1.0 / (2.0 * m.k)) * cost_lower(a, m.k);
}

double cost_upper_scaled(double a, const AcceptanceModel& m) {
    check_model(m);
    return std::pow(m.alpha / 2.0, 1.0 / (2.0 * m.k)) * cost_upper(a, m.k);
}

double optimal_acceptance(int k, CostBound bound) {
    check_order(k);
    auto f = [k, bound](double a) {
        return bound == CostBound::lower ? cost_lower(a, k) : cost_upper(a, k);
    };
    return stats::golden_section_min(f, 0.01, 0.99, 1e-6);
}

DualAveragingState dual_averaging_init(double eps0, double target, double gamma, double t0,
                                       double kappa) {
    if (!(eps0 > 0.0)) throw ContractViolation("dual averaging: eps0 must be positive");
    if (!(target > 0.0 && target < 1.0))
        throw ContractViolation("dual averaging: target must lie in (0, 1)");
    DualAveragingState s;
    s.log_eps = std::log(eps0);
    s.log_eps_avg = std::log(eps0);
    s.target = target;
    s.gamma = gamma;
    s.t0 = t0;
    s.kappa = kappa;
    s.mu = std::log(10.0 * eps0);
    return s;
}

DualAveragingState adapt_step(DualAveragingState state, double observed_accept_prob) {
    if (!(observed_accept_prob >= 0.0 && observed_accept_prob <= 1.0))
        throw ContractViolation("adapt_step: observed acceptance must lie in [0, 1]");
    double m = static_cast<double>(++state.iteration);
    state.h_avg += (state.target - observed_accept_prob - state.h_avg) / (m + state.t0);
    state.log_eps = state.mu - std::sqrt(m) / state.gamma * state.h_avg;
    double eta = std::pow(m, -state.kappa);
    state.log_eps_avg = eta * state.log_eps + (1.0 - eta) * state.log_eps_avg;
    return state;
}

double current_step(const DualAveragingState& state) { return std::exp(state.log_eps); }

double averaged_step(const DualAveragingState& state) { return std::exp(state.log_eps_avg); }

TuningReport robust_target_search(const TargetModel& model, const ChainConfig& base,
                                  double initial_target, const ProbeOptions& opts) {
    if (!(initial_target > 0.0 && initial_target < opts.max_target && opts.max_target < 1.0))
        throw ContractViolation(
            "robust_target_search: need 0 < initial_target < max_target < 1");
    if (!(opts.step > 0.0)) throw ContractViolation("robust_target_search: step must be > 0");
    if (opts.n_warmup < 1 || opts.n_probe < 1)
        throw ContractViolation("robust_target_search: probe lengths must be >= 1");

    std::vector<std::pair<double, long>> trace;
    double target = initial_target;
    for (std::uint64_t attempt = 0;; ++attempt) {
        ChainConfig cfg = base;
        cfg.seed = derive_seed(base.seed, attempt);
        cfg.n_warmup = opts.n_warmup;
        cfg.n_samples = opts.n_probe;
        cfg.adapt.enabled = true;
        cfg.adapt.target = target;
        ChainOutput out = run_chain(model, cfg);

        double accept_sum = 0.0;
        for (long i = 0; i < opts.n_probe; ++i)
            accept_sum += out.records[static_cast<size_t>(opts.n_warmup + i)].accept_prob;
        trace.emplace_back(target, out.n_divergent_sampling);

        if (out.n_divergent_sampling == 0) {
            TuningReport report;
            report.target_acceptance = target;
            report.achieved_acceptance = accept_sum / static_cast<double>(opts.n_probe);
            report.final_step_size = out.adapted_step;
            report.n_divergent = 0;
            report.relaxation_trace = std::move(trace);
            return report;
        }
        if (target >= opts.max_target - 1e-12)
            throw TargetExhaustion(std::move(trace),
                                   "robust_target_search: divergences persist at target " +
                                       std::to_string(target));
        target = std::min(target + opts.step, opts.max_target);
    }
}

}  // namespace hmc
