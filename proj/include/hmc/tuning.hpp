#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hmc/model.hpp"
#include "hmc/sampler.hpp"

namespace hmc {

// Parameters of the Gaussian error model Delta ~ N(-alpha eps^{2k}, 2 alpha eps^{2k})
// under which every closed form below is exact.  Mind the convention: alpha is
// HALF the kappa_2 scale, so a fit of kappa_2 = c eps^{2k} enters as alpha = c/2.
struct AcceptanceModel {
    double alpha = 1.0;
    int k = 2;
};

// Average Metropolis acceptance, 2 Phi(-sqrt(alpha/2) eps^k); 1 at eps = 0.
double acceptance_curve(const AcceptanceModel& m, double eps);

// Inverse of acceptance_curve: eps(a) = [sqrt(2/alpha) Phi^{-1}(1 - a/2)]^{1/k}.
double epsilon_for_acceptance(const AcceptanceModel& m, double a);

// E[1/a] under the same error model,
//   Phi(-sqrt(alpha/2) eps^k) + Phi(3 sqrt(alpha/2) eps^k) exp(2 alpha eps^{2k}),
// evaluated in log space; saturates to +infinity instead of overflowing.
double expected_inverse_acceptance(const AcceptanceModel& m, double eps);

// Cost-per-unit-time bounds as functions of the average acceptance, with the
// alpha-dependent prefactor dropped: it scales both bounds equally and moves
// neither minimizer.
double cost_lower(double a, int k);
double cost_upper(double a, int k);

// The same bounds with the alpha prefactor restored, for plotting against
// empirical cost data (comparisons to data need the scale).
double cost_lower_scaled(double a, const AcceptanceModel& m);
double cost_upper_scaled(double a, const AcceptanceModel& m);

enum class CostBound { lower, upper };

// Acceptance target minimizing the chosen bound: golden-section search over
// [0.01, 0.99] to within 1e-6.
double optimal_acceptance(int k, CostBound bound);

// Nesterov-style dual averaging of log(eps) toward a target acceptance
// statistic.  mu = log(10 eps0) biases exploration toward larger steps.
struct DualAveragingState {
    double log_eps = 0.0;
    double log_eps_avg = 0.0;
    double h_avg = 0.0;
    long iteration = 0;
    double target = 0.8;
    double gamma = 0.05;
    double t0 = 10.0;
    double kappa = 0.75;
    double mu = 0.0;
};

DualAveragingState dual_averaging_init(double eps0, double target, double gamma = 0.05,
                                       double t0 = 10.0, double kappa = 0.75);

// One update with the observed acceptance probability; pure in (state, obs).
DualAveragingState adapt_step(DualAveragingState state, double observed_accept_prob);

double current_step(const DualAveragingState& state);   // warmup value, exp(log_eps)
double averaged_step(const DualAveragingState& state);  // frozen value, exp(log_eps_avg)

struct ProbeOptions {
    double step = 0.05;        // target increment between probes
    double max_target = 0.99;
    long n_warmup = 500;       // adaptation transitions per probe
    long n_probe = 500;        // frozen-step transitions counted for divergences
};

struct TuningReport {
    double fitted_alpha = 0.0;  // 0 when no alpha fit was involved
    double target_acceptance = 0.0;
    double achieved_acceptance = 0.0;
    double final_step_size = 0.0;
    long n_divergent = 0;
    std::vector<std::pair<double, long>> relaxation_trace;  // (target, divergences)
};

// Raises the acceptance target from initial_target in increments of opts.step
// until a probe chain runs divergence-free, re-adapting the step size at each
// target.  Throws TargetExhaustion (with the trace) if divergences persist at
// max_target.
TuningReport robust_target_search(const TargetModel& model, const ChainConfig& base,
                                  double initial_target, const ProbeOptions& opts = {});

}  // namespace hmc
