#pragma once

#include <functional>
#include <string>

#include "hmc/rng.hpp"
#include "hmc/types.hpp"

namespace hmc {

// A target distribution, described by its negative log density V (up to an
// additive constant) and the machinery HMC needs around it.  The raw function
// fields never validate their input; the checked free functions below do.
struct TargetModel {
    std::string name;
    Eigen::Index dim = 0;
    std::function<double(const Vector&)> potential;
    std::function<void(const Vector&, Vector&)> gradient;
    // Optional: w -> (Hessian of V) * w.  Absent means "use finite differences".
    std::function<void(const Vector&, const Vector&, Vector&)> hessian_vector_product;
    // Optional: independent draws from the target itself.
    std::function<Vector(Rng&)> exact_position_sampler;

    bool has_hvp() const { return static_cast<bool>(hessian_vector_product); }
    bool has_exact_sampler() const { return static_cast<bool>(exact_position_sampler); }
};

double potential_energy(const TargetModel& model, const Vector& q);
Vector gradient(const TargetModel& model, const Vector& q);
Vector hessian_vector_product(const TargetModel& model, const Vector& q, const Vector& w);

double kinetic_energy(const Vector& p);  // unit metric: |p|^2 / 2
double hamiltonian(const TargetModel& model, const PhaseState& z);

Vector sample_momentum(Rng& rng, Eigen::Index dim);
// Exact canonical draw: position from the target, fresh Gaussian momentum.
PhaseState sample_exact(const TargetModel& model, Rng& rng);

TargetModel standard_gaussian(Eigen::Index dim);
TargetModel scaled_gaussian(Vector scales);

// Funnel hierarchy: v ~ N(0, scale^2), x_i | v ~ N(0, e^v) for n_latent
// latents.  Position layout is q = (v, x_1, ..., x_n), so dim = n_latent + 1.
TargetModel funnel(Eigen::Index n_latent = 50, double scale = 3.0);

}  // namespace hmc
