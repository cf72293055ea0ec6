#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "doctest.h"
#include "hmc/errors.hpp"
#include "hmc/integrator.hpp"
#include "hmc/model.hpp"

using namespace hmc;

namespace {

PhaseState random_state(Rng& rng, Eigen::Index dim) {
    return PhaseState(rng.normal_vector(dim), rng.normal_vector(dim));
}

PhaseState scheme_step(const TargetModel& m, const PhaseState& z, double eps, Scheme s) {
    return s == Scheme::leapfrog ? leapfrog_step(m, z, eps) : yoshida4_step(m, z, eps);
}

TargetModel free_particle(Eigen::Index dim) {
    TargetModel m;
    m.name = "free";
    m.dim = dim;
    m.potential = [](const Vector&) { return 0.0; };
    m.gradient = [](const Vector&, Vector& out) { out.setZero(); };
    return m;
}

}  // namespace

TEST_CASE("scheme order and step counts") {
    CHECK(scheme_order(Scheme::leapfrog) == 2);
    CHECK(scheme_order(Scheme::yoshida4) == 4);

    CHECK(step_count(1.0, 0.1) == 10);
    CHECK(step_count(3.5, 1.0) == 4);    // 3.5 rounds away from zero
    CHECK(step_count(0.25, 0.1) == 3);   // 2.5 rounds away from zero
    CHECK(step_count(0.05, 0.1) == 1);   // never fewer than one step
    CHECK(step_count(1.0, 0.3) == 3);
}

TEST_CASE("single leapfrog step against hand arithmetic") {
    auto sg = standard_gaussian(1);
    PhaseState z(Vector::Constant(1, 1.0), Vector::Zero(1));
    PhaseState out = leapfrog_step(sg, z, 0.1);
    CHECK(out.position[0] == doctest::Approx(0.995).epsilon(1e-14));
    CHECK(out.momentum[0] == doctest::Approx(-0.09975).epsilon(1e-14));

    // Origin is a fixed point of the flow.
    PhaseState o = leapfrog_step(sg, PhaseState(Vector::Zero(1), Vector::Zero(1)), 0.3);
    CHECK(o.position[0] == 0.0);
    CHECK(o.momentum[0] == 0.0);
}

TEST_CASE("composition coefficients of the fourth-order step sum to one") {
    // On a free particle one step is pure drift, so any error in the
    // coefficient sum shows up directly in the position update.
    auto m = free_particle(3);
    Rng rng(17);
    PhaseState z = random_state(rng, 3);
    PhaseState out = yoshida4_step(m, z, 0.37);
    for (int i = 0; i < 3; ++i) {
        CHECK(out.position[i] ==
              doctest::Approx(z.position[i] + 0.37 * z.momentum[i]).epsilon(1e-14));
        CHECK(out.momentum[i] == z.momentum[i]);
    }
}

TEST_CASE("both schemes are reversible under momentum flip") {
    Rng rng(88);
    Vector scales(2);
    scales << 0.5, 1.5;
    std::vector<TargetModel> models;
    models.push_back(standard_gaussian(3));
    models.push_back(scaled_gaussian(scales));
    models.push_back(funnel(4, 3.0));
    for (const auto& model : models) {
        for (Scheme s : {Scheme::leapfrog, Scheme::yoshida4}) {
            for (int rep = 0; rep < 10; ++rep) {
                PhaseState z = random_state(rng, model.dim);
                PhaseState fwd = scheme_step(model, z, 0.05, s);
                fwd.momentum = -fwd.momentum;
                PhaseState back = scheme_step(model, fwd, 0.05, s);
                for (Eigen::Index i = 0; i < model.dim; ++i) {
                    CHECK(std::abs(back.position[i] - z.position[i]) < 1e-10);
                    CHECK(std::abs(back.momentum[i] + z.momentum[i]) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("trajectory shape and bookkeeping") {
    auto sg = standard_gaussian(2);
    Rng rng(5);
    PhaseState z = random_state(rng, 2);
    Trajectory traj = integrate(sg, z, {0.1, Scheme::leapfrog}, 1.0);
    CHECK(traj.n_steps == 10);
    CHECK(traj.states.size() == 11);
    CHECK(traj.energy_errors.size() == 11);
    CHECK(traj.energy_errors[0] == 0.0);
    CHECK(traj.tau_eff == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(traj.divergent);
    CHECK(traj.states.front().position == z.position);
}

TEST_CASE("small steps track the exact oscillator flow") {
    auto sg = standard_gaussian(1);
    PhaseState z(Vector::Constant(1, 1.0), Vector::Zero(1));
    Trajectory traj = integrate(sg, z, {0.001, Scheme::leapfrog}, 1.0);
    CHECK(traj.states.back().position[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-5));
    CHECK(traj.states.back().momentum[0] == doctest::Approx(-std::sin(1.0)).epsilon(1e-5));
}

TEST_CASE("proposal flips momentum and is an involution") {
    auto sg = standard_gaussian(2);
    Rng rng(23);
    PhaseState z = random_state(rng, 2);
    auto [prop, traj] = propose(sg, z, {0.1, Scheme::leapfrog}, 0.7);
    CHECK(prop.momentum == -traj.states.back().momentum);
    auto [back, traj2] = propose(sg, prop, {0.1, Scheme::leapfrog}, 0.7);
    CHECK(traj2.n_steps == traj.n_steps);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(back.position[i] - z.position[i]) < 1e-10);
        CHECK(std::abs(back.momentum[i] - z.momentum[i]) < 1e-10);
    }
}

TEST_CASE("proposal summary agrees with the full trajectory") {
    auto sg = standard_gaussian(3);
    Rng rng(31);
    PhaseState z = random_state(rng, 3);
    IntegratorConfig cfg{0.2, Scheme::yoshida4};
    auto [prop, traj] = propose(sg, z, cfg, 1.3);
    ProposalSummary sum = propose_summary(sg, z, cfg, 1.3);
    CHECK(sum.n_steps == traj.n_steps);
    CHECK(sum.tau_eff == traj.tau_eff);
    CHECK(sum.divergent == traj.divergent);
    CHECK(sum.final_state.position == prop.position);
    CHECK(sum.final_state.momentum == prop.momentum);
    double max_growth = 0.0;
    for (double e : traj.energy_errors) max_growth = std::max(max_growth, e);
    CHECK(sum.max_energy_growth == doctest::Approx(max_growth).epsilon(1e-14));
}

TEST_CASE("hamiltonian error sign convention and degenerate inputs") {
    auto sg = standard_gaussian(1);
    PhaseState z(Vector::Constant(1, 1.0), Vector::Zero(1));
    PhaseState prop = leapfrog_step(sg, z, 0.1);
    // delta = H(z) - H(prop) = 0.5 - (0.995^2 + 0.09975^2)/2.
    CHECK(hamiltonian_error(sg, z, prop) == doctest::Approx(1.246875e-5).epsilon(1e-8));
    CHECK(hamiltonian_error(sg, z, z) == 0.0);

    PhaseState bad(Vector::Constant(1, std::nan("")), Vector::Zero(1));
    double d = hamiltonian_error(sg, z, bad);
    CHECK(std::isinf(d));
    CHECK(d < 0.0);
    CHECK_THROWS_AS(hamiltonian_error(sg, z, PhaseState(Vector::Zero(2), Vector::Zero(2))),
                    ContractViolation);
}

TEST_CASE("unstable step sizes are flagged as divergent") {
    auto sg = standard_gaussian(1);
    PhaseState z(Vector::Constant(1, 1.0), Vector::Zero(1));
    Trajectory bad = integrate(sg, z, {3.0, Scheme::leapfrog}, 30.0);
    CHECK(bad.divergent);
    ProposalSummary sum = propose_summary(sg, z, {3.0, Scheme::leapfrog}, 30.0);
    CHECK(sum.divergent);

    // Just inside the stability limit of the unit oscillator nothing diverges.
    Trajectory ok = integrate(sg, z, {1.9, Scheme::leapfrog}, 30.0);
    CHECK_FALSE(ok.divergent);
}

TEST_CASE("integration rejects malformed arguments") {
    auto sg = standard_gaussian(2);
    PhaseState z(Vector::Zero(2), Vector::Zero(2));
    CHECK_THROWS_AS(integrate(sg, z, {0.0, Scheme::leapfrog}, 1.0), ContractViolation);
    CHECK_THROWS_AS(integrate(sg, z, {0.1, Scheme::leapfrog}, -1.0), ContractViolation);
    CHECK_THROWS_AS(integrate(sg, z, {0.1, Scheme::leapfrog}, 1.0, 1.0, nullptr),
                    ContractViolation);  // jitter must stay below 1
    Rng rng(1);
    CHECK_THROWS_AS(integrate(sg, z, {0.1, Scheme::leapfrog}, 1.0, 0.2, nullptr),
                    ContractViolation);  // jitter needs a generator
    CHECK_NOTHROW(integrate(sg, z, {0.1, Scheme::leapfrog}, 1.0, 0.2, &rng));
    PhaseState wrong(Vector::Zero(3), Vector::Zero(3));
    CHECK_THROWS_AS(integrate(sg, wrong, {0.1, Scheme::leapfrog}, 1.0), ContractViolation);
}

TEST_CASE("jittered integration times vary and stay in band") {
    CHECK(effective_time(2.0, 0.0, nullptr) == 2.0);
    Rng rng(9);
    std::set<int> counts;
    for (int i = 0; i < 50; ++i) {
        double t = effective_time(1.0, 0.3, &rng);
        CHECK(t >= 0.7);
        CHECK(t <= 1.3);
        counts.insert(step_count(t, 0.1));
    }
    CHECK(counts.size() >= 2);  // jitter actually changes the step count
}

TEST_CASE("shadow correction term for the leapfrog scheme") {
    auto sg = standard_gaussian(1);
    auto G = [&](double q, double p) {
        return correction_G(sg, PhaseState(Vector::Constant(1, q), Vector::Constant(1, p)));
    };
    CHECK(G(1.0, 0.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(G(0.0, 0.0) == 0.0);
    CHECK(G(1.0, 1.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        double q = rng.normal(), p = rng.normal();
        CHECK(G(q, p) == doctest::Approx((2.0 * q * q - p * p) / 24.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(correction_G(sg, PhaseState(Vector::Zero(1), Vector::Zero(1)),
                                 Scheme::yoshida4),
                    UnsupportedOperation);
}

TEST_CASE("one-step maps preserve phase-space volume") {
    Vector scale(1);
    scale << 1.7;
    std::vector<TargetModel> models;
    models.push_back(standard_gaussian(1));
    models.push_back(scaled_gaussian(scale));
    const double h = 1e-6;
    for (const auto& model : models) {
        for (Scheme s : {Scheme::leapfrog, Scheme::yoshida4}) {
            for (auto [q0, p0] : {std::pair{0.7, -0.3}, std::pair{-1.2, 0.4}}) {
                auto flow = [&](double q, double p) {
                    return scheme_step(model,
                                       PhaseState(Vector::Constant(1, q),
                                                  Vector::Constant(1, p)),
                                       0.2, s);
                };
                PhaseState qp = flow(q0 + h, p0), qm = flow(q0 - h, p0);
                PhaseState pp = flow(q0, p0 + h), pm = flow(q0, p0 - h);
                double dqdq = (qp.position[0] - qm.position[0]) / (2 * h);
                double dpdq = (qp.momentum[0] - qm.momentum[0]) / (2 * h);
                double dqdp = (pp.position[0] - pm.position[0]) / (2 * h);
                double dpdp = (pp.momentum[0] - pm.momentum[0]) / (2 * h);
                double det = dqdq * dpdp - dqdp * dpdq;
                CHECK(std::abs(det - 1.0) < 1e-6);
            }
        }
    }
}

TEST_CASE("leading-order mean energy gain of the unit oscillator") {
    constexpr double pi = std::numbers::pi;
    CHECK(analytic_mean_error_gaussian(0.5, pi / 2.0) ==
          doctest::Approx(0.001953125).epsilon(1e-14));
    CHECK(std::abs(analytic_mean_error_gaussian(0.3, pi)) < 1e-16);
    CHECK(analytic_mean_error_gaussian(0.0, 1.0) == 0.0);
    CHECK(analytic_mean_error_gaussian(0.4, 1.6) > 0.0);
}
