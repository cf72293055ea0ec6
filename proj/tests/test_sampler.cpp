#include <cmath>
#include <vector>

#include "doctest.h"
#include "hmc/diagnostics.hpp"
#include "hmc/errors.hpp"
#include "hmc/sampler.hpp"
#include "hmc/stats.hpp"

using namespace hmc;

namespace {

TargetModel flat_potential(Eigen::Index dim) {
    TargetModel m;
    m.name = "flat";
    m.dim = dim;
    m.potential = [](const Vector&) { return 0.0; };
    m.gradient = [](const Vector&, Vector& out) { out.setZero(); };
    return m;
}

bool records_equal(const TransitionRecord& a, const TransitionRecord& b) {
    return a.accepted == b.accepted && a.delta == b.delta &&
           a.accept_prob == b.accept_prob && a.divergent == b.divergent &&
           a.n_steps == b.n_steps && a.step_size == b.step_size;
}

}  // namespace

TEST_CASE("a flat potential conserves energy and always accepts") {
    auto m = flat_potential(2);
    Rng rng(1);
    Vector q = Vector::Zero(2);
    auto [q_next, rec] = hmc_transition(m, rng, q, {0.25, Scheme::leapfrog}, 1.0);
    CHECK(rec.delta == 0.0);
    CHECK(rec.accept_prob == 1.0);
    CHECK(rec.accepted);
    CHECK_FALSE(rec.divergent);
    CHECK(rec.n_steps == 4);
    CHECK(rec.step_size == 0.25);
}

TEST_CASE("divergent proposals are rejected with the position intact") {
    auto sg = standard_gaussian(1);
    Rng rng(7);
    Vector q = Vector::Constant(1, 1.0);
    auto [q_next, rec] = hmc_transition(sg, rng, q, {3.0, Scheme::leapfrog}, 30.0);
    CHECK(rec.divergent);
    CHECK(rec.accept_prob == 0.0);
    CHECK_FALSE(rec.accepted);
    CHECK(q_next[0] == q[0]);  // bit-for-bit, no arithmetic applied
}

TEST_CASE("each transition consumes a fixed slice of the random stream") {
    auto sg = standard_gaussian(3);
    Vector q = Vector::Zero(3);
    Rng a(2024), b(2024);
    hmc_transition(sg, a, q, {0.3, Scheme::leapfrog}, 1.0);
    // Same stream advanced by hand: momentum draw plus the acceptance uniform.
    sample_momentum(b, 3);
    b.uniform();
    CHECK(a.normal() == b.normal());
}

TEST_CASE("acceptance probability equals the clipped energy ratio") {
    auto sg = standard_gaussian(3);
    Rng rng(5150);
    Vector q = Vector::Zero(3);
    int accepted = 0;
    for (int i = 0; i < 200; ++i) {
        auto [q_next, rec] = hmc_transition(sg, rng, q, {0.5, Scheme::leapfrog}, 1.0);
        REQUIRE_FALSE(rec.divergent);
        CHECK(rec.accept_prob ==
              doctest::Approx(std::min(1.0, std::exp(rec.delta))).epsilon(1e-15));
        if (rec.accepted) ++accepted;
        q = q_next;
    }
    CHECK(accepted > 150);  // this step size accepts nearly everything
    CHECK_THROWS_AS(hmc_transition(sg, rng, Vector::Zero(2), {0.5, Scheme::leapfrog}, 1.0),
                    ContractViolation);
}

TEST_CASE("chains have the contracted shape and are seed-deterministic") {
    auto sg = standard_gaussian(3);
    ChainConfig cfg;
    cfg.seed = 99;
    cfg.n_warmup = 50;
    cfg.n_samples = 120;
    cfg.initial_step = 0.4;
    auto out = run_chain(sg, cfg);
    CHECK(out.draws.rows() == 120);
    CHECK(out.draws.cols() == 3);
    CHECK(out.records.size() == 170);
    CHECK(out.n_divergent_sampling == 0);
    CHECK(out.adapted_step == 0.4);  // adaptation off: the step never moves

    auto again = run_chain(sg, cfg);
    CHECK(out.draws == again.draws);
    CHECK(out.adapted_step == again.adapted_step);
    REQUIRE(out.records.size() == again.records.size());
    for (size_t i = 0; i < out.records.size(); ++i) {
        CHECK(records_equal(out.records[i], again.records[i]));
    }
}

TEST_CASE("chain configuration is validated") {
    auto sg = standard_gaussian(2);
    ChainConfig cfg;
    cfg.n_samples = 0;
    CHECK_THROWS_AS(run_chain(sg, cfg), ContractViolation);
    cfg = ChainConfig{};
    cfg.n_warmup = -1;
    CHECK_THROWS_AS(run_chain(sg, cfg), ContractViolation);
    cfg = ChainConfig{};
    cfg.initial_step = 0.0;
    CHECK_THROWS_AS(run_chain(sg, cfg), ContractViolation);
    cfg = ChainConfig{};
    cfg.initial_position = Vector::Zero(3);
    CHECK_THROWS_AS(run_chain(sg, cfg), ContractViolation);
    cfg = ChainConfig{};
    Vector bad(2);
    bad << 0.0, std::nan("");
    cfg.initial_position = bad;
    CHECK_THROWS_AS(run_chain(sg, cfg), DomainError);
    auto bare = flat_potential(2);
    cfg = ChainConfig{};
    cfg.init = ChainInit::exact;
    CHECK_THROWS_AS(run_chain(bare, cfg), UnsupportedOperation);
}

TEST_CASE("an explicit initial position seeds the chain") {
    auto sg = standard_gaussian(1);
    ChainConfig cfg;
    cfg.seed = 4;
    cfg.n_warmup = 0;
    cfg.n_samples = 1;
    cfg.initial_step = 1e-8;
    cfg.tau = 1e-8;  // a single microscopic step keeps the draw at the start
    cfg.initial_position = Vector::Constant(1, 5.0);
    auto out = run_chain(sg, cfg);
    CHECK(out.draws(0, 0) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("long gaussian chain reproduces the target moments") {
    auto sg = standard_gaussian(1);
    ChainConfig cfg;
    cfg.seed = 31415;
    cfg.n_warmup = 100;
    cfg.n_samples = 200000;
    cfg.initial_step = 0.6;
    cfg.tau = 1.0;
    auto out = run_chain(sg, cfg);
    std::vector<double> x(out.draws.col(0).begin(), out.draws.col(0).end());
    CHECK(std::abs(stats::mean(x)) < 0.02);
    CHECK(std::abs(stats::sample_variance(x) - 1.0) < 0.03);
}

TEST_CASE("dual averaging lands on the requested acceptance rate") {
    auto sg = standard_gaussian(10);
    ChainConfig cfg;
    cfg.seed = 2718;
    cfg.n_warmup = 3000;
    cfg.n_samples = 2000;
    cfg.initial_step = 0.1;
    cfg.adapt.enabled = true;
    cfg.adapt.target = 0.8;
    auto out = run_chain(sg, cfg);
    double sum = 0.0;
    for (long i = cfg.n_warmup; i < cfg.n_warmup + cfg.n_samples; ++i) {
        sum += out.records[size_t(i)].accept_prob;
    }
    double achieved = sum / double(cfg.n_samples);
    CHECK(std::abs(achieved - 0.8) < 0.03);
    CHECK(out.adapted_step > 0.0);
    CHECK(out.adapted_step != cfg.initial_step);
}

TEST_CASE("chain ensembles are order-preserving and worker-independent") {
    auto sg = standard_gaussian(4);
    std::vector<ChainConfig> configs(3);
    for (size_t i = 0; i < 3; ++i) {
        configs[i].seed = 100 + i;
        configs[i].n_warmup = 50;
        configs[i].n_samples = 200;
        configs[i].initial_step = 0.4;
    }
    auto serial = run_chains(sg, configs, 1);
    auto parallel = run_chains(sg, configs, 4);
    REQUIRE(serial.size() == 3);
    REQUIRE(parallel.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(serial[i].draws == parallel[i].draws);
        auto solo = run_chain(sg, configs[i]);
        CHECK(solo.draws == serial[i].draws);
    }
    CHECK(serial[0].draws != serial[1].draws);
    CHECK(serial[1].draws != serial[2].draws);

    CHECK_THROWS_AS(run_chains(sg, {}), ContractViolation);
}

TEST_CASE("four healthy chains mix by the split diagnostic") {
    auto sg = standard_gaussian(5);
    std::vector<ChainConfig> configs(4);
    for (size_t i = 0; i < 4; ++i) {
        configs[i].seed = 7000 + i;
        configs[i].n_warmup = 200;
        configs[i].n_samples = 2000;
        configs[i].initial_step = 0.5;
        configs[i].init = ChainInit::exact;
    }
    auto outs = run_chains(sg, configs);
    std::vector<std::vector<double>> coord;
    for (const auto& o : outs) {
        coord.emplace_back(o.draws.col(0).begin(), o.draws.col(0).end());
    }
    auto r = split_rhat(coord);
    CHECK(r.rhat < 1.02);
    CHECK(r.n_chains_used == 8);
}
