#include "hmc/integrator.hpp"

#include <cmath>
#include <limits>

#include "hmc/errors.hpp"

namespace hmc {

namespace {

// Triple-jump composition coefficients: w1 * eps, w0 * eps, w1 * eps with
// w1 = 1 / (2 - 2^(1/3)) and w0 = -2^(1/3) / (2 - 2^(1/3)); 2*w1 + w0 = 1.
const double kCbrt2 = std::cbrt(2.0);
const double kYoshidaW1 = 1.0 / (2.0 - kCbrt2);
const double kYoshidaW0 = -kCbrt2 / (2.0 - kCbrt2);

// Shared stepping core.  Keeps the gradient of the current position cached so
// a leapfrog step costs one fresh gradient evaluation.
class Stepper {
  public:
    Stepper(const TargetModel& model, const PhaseState& z0)
        : model_(model), q_(z0.position), p_(z0.momentum), g_(model.dim) {
        model_.gradient(q_, g_);
    }

    void step(double eps, Scheme scheme) {
        if (scheme == Scheme::leapfrog) {
            leap(eps);
        } else {
            leap(kYoshidaW1 * eps);
            leap(kYoshidaW0 * eps);
            leap(kYoshidaW1 * eps);
        }
    }

    double energy() const { return model_.potential(q_) + 0.5 * p_.squaredNorm(); }
    bool finite() const { return q_.allFinite() && p_.allFinite(); }
    PhaseState state() const { return PhaseState(q_, p_); }
    PhaseState take_state() { return PhaseState(std::move(q_), std::move(p_)); }

  private:
    void leap(double h) {
        p_.noalias() -= (0.5 * h) * g_;
        q_.noalias() += h * p_;
        model_.gradient(q_, g_);
        p_.noalias() -= (0.5 * h) * g_;
    }

    const TargetModel& model_;
    Vector q_, p_, g_;
};

void check_integrate_args(const TargetModel& model, const PhaseState& z0,
                          const IntegratorConfig& cfg, double tau, double jitter, Rng* rng) {
    if (z0.position.size() != model.dim || z0.momentum.size() != model.dim)
        throw ContractViolation("integrate: state dimension mismatch");
    if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size))
        throw ContractViolation("integrate: step_size must be positive and finite");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw ContractViolation("integrate: tau must be positive and finite");
    if (jitter < 0.0 || jitter >= 1.0)
        throw ContractViolation("integrate: tau_jitter must lie in [0, 1)");
    if (jitter > 0.0 && rng == nullptr)
        throw ContractViolation("integrate: tau_jitter > 0 requires an rng");
}

}  // namespace

int scheme_order(Scheme scheme) {
    return scheme == Scheme::leapfrog ? 2 : 4;
}

int step_count(double tau, double step_size) {
    double ratio = tau / step_size;
    int n = static_cast<int>(std::floor(ratio + 0.5));  // half rounds away from zero
    return n < 1 ? 1 : n;
}

double effective_time(double tau, double jitter, Rng* rng) {
    if (jitter == 0.0) return tau;
    return rng->uniform(tau * (1.0 - jitter), tau * (1.0 + jitter));
}

PhaseState leapfrog_step(const TargetModel& model, const PhaseState& z, double step_size) {
    Stepper s(model, z);
    s.step(step_size, Scheme::leapfrog);
    return s.take_state();
}

PhaseState yoshida4_step(const TargetModel& model, const PhaseState& z, double step_size) {
    Stepper s(model, z);
    s.step(step_size, Scheme::yoshida4);
    return s.take_state();
}

Trajectory integrate(const TargetModel& model, const PhaseState& z0,
                     const IntegratorConfig& cfg, double tau, double tau_jitter, Rng* rng,
                     double divergence_threshold) {
    check_integrate_args(model, z0, cfg, tau, tau_jitter, rng);
    double t = effective_time(tau, tau_jitter, rng);
    int n_steps = step_count(t, cfg.step_size);

    Trajectory traj;
    traj.n_steps = n_steps;
    traj.tau_eff = n_steps * cfg.step_size;
    traj.states.reserve(static_cast<size_t>(n_steps) + 1);
    traj.energy_errors.reserve(static_cast<size_t>(n_steps) + 1);
    traj.states.push_back(z0);
    traj.energy_errors.push_back(0.0);

    Stepper s(model, z0);
    double h0 = s.energy();
    bool blown = !std::isfinite(h0);
    for (int i = 0; i < n_steps; ++i) {
        if (blown) {
            // The state is already non-finite; stop calling the model and pad
            // the trajectory so it keeps its contracted shape.
            traj.states.push_back(traj.states.back());
            traj.energy_errors.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        s.step(cfg.step_size, cfg.scheme);
        traj.states.push_back(s.state());
        if (!s.finite()) {
            blown = true;
            traj.energy_errors.push_back(std::numeric_limits<double>::quiet_NaN());
            traj.divergent = true;
            continue;
        }
        double err = s.energy() - h0;
        traj.energy_errors.push_back(err);
        if (!std::isfinite(err) || err > divergence_threshold) traj.divergent = true;
    }
    if (blown) traj.divergent = true;
    return traj;
}

std::pair<PhaseState, Trajectory> propose(const TargetModel& model, const PhaseState& z0,
                                          const IntegratorConfig& cfg, double tau,
                                          double tau_jitter, Rng* rng,
                                          double divergence_threshold) {
    Trajectory traj = integrate(model, z0, cfg, tau, tau_jitter, rng, divergence_threshold);
    PhaseState prop = traj.states.back();
    prop.momentum = -prop.momentum;
    return {std::move(prop), std::move(traj)};
}

ProposalSummary propose_summary(const TargetModel& model, const PhaseState& z0,
                                const IntegratorConfig& cfg, double tau, double tau_jitter,
                                Rng* rng, double divergence_threshold) {
    check_integrate_args(model, z0, cfg, tau, tau_jitter, rng);
    double t = effective_time(tau, tau_jitter, rng);
    int n_steps = step_count(t, cfg.step_size);

    ProposalSummary out;
    out.n_steps = n_steps;
    out.tau_eff = n_steps * cfg.step_size;

    Stepper s(model, z0);
    double h0 = s.energy();
    if (!std::isfinite(h0)) {
        out.divergent = true;
        out.final_state = z0;
        out.final_state.momentum = -out.final_state.momentum;
        return out;
    }
    for (int i = 0; i < n_steps; ++i) {
        s.step(cfg.step_size, cfg.scheme);
        if (!s.finite()) {
            out.divergent = true;
            break;
        }
        double err = s.energy() - h0;
        if (err > out.max_energy_growth) out.max_energy_growth = err;
        if (!std::isfinite(err) || err > divergence_threshold) out.divergent = true;
    }
    out.final_state = s.take_state();
    out.final_state.momentum = -out.final_state.momentum;
    return out;
}

double hamiltonian_error(const TargetModel& model, const PhaseState& z,
                         const PhaseState& z_prop) {
    if (z.position.size() != model.dim || z_prop.position.size() != model.dim)
        throw ContractViolation("hamiltonian_error: dimension mismatch");
    if (!z_prop.finite() || !z.finite())
        return -std::numeric_limits<double>::infinity();
    double h0 = model.potential(z.position) + 0.5 * z.momentum.squaredNorm();
    double h1 = model.potential(z_prop.position) + 0.5 * z_prop.momentum.squaredNorm();
    if (!std::isfinite(h0) || !std::isfinite(h1))
        return -std::numeric_limits<double>::infinity();
    return h0 - h1;
}

double correction_G(const TargetModel& model, const PhaseState& z, Scheme scheme) {
    if (scheme != Scheme::leapfrog)
        throw UnsupportedOperation("correction_G: only defined for the leapfrog scheme");
    Vector g = gradient(model, z.position);
    Vector hp = hessian_vector_product(model, z.position, z.momentum);
    return (2.0 * g.squaredNorm() - z.momentum.dot(hp)) / 24.0;
}

double analytic_mean_error_gaussian(double eps, double tau) {
    return eps * eps * eps * eps * (1.0 - std::cos(2.0 * tau)) / 64.0;
}

}  // namespace hmc
