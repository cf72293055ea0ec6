#include "hmc/model.hpp"

#include <cmath>

#include "hmc/errors.hpp"

namespace hmc {

namespace {

void require_input(const TargetModel& model, const Vector& q, const char* op) {
    if (q.size() != model.dim)
        throw ContractViolation(std::string(op) + ": dimension mismatch");
    if (!q.allFinite()) throw DomainError(std::string(op) + ": non-finite input");
}

}  // namespace

double potential_energy(const TargetModel& model, const Vector& q) {
    require_input(model, q, "potential_energy");
    return model.potential(q);
}

Vector gradient(const TargetModel& model, const Vector& q) {
    require_input(model, q, "gradient");
    Vector g(model.dim);
    model.gradient(q, g);
    return g;
}

Vector hessian_vector_product(const TargetModel& model, const Vector& q, const Vector& w) {
    require_input(model, q, "hessian_vector_product");
    if (w.size() != model.dim)
        throw ContractViolation("hessian_vector_product: direction dimension mismatch");
    if (!w.allFinite()) throw DomainError("hessian_vector_product: non-finite direction");

    Vector out(model.dim);
    if (model.has_hvp()) {
        model.hessian_vector_product(q, w, out);
        return out;
    }
    // Central difference of the gradient along w.
    double wnorm = w.norm();
    if (wnorm == 0.0) {
        out.setZero();
        return out;
    }
    double h = 6e-6 * (1.0 + q.norm());
    Vector u = w / wnorm;
    Vector gp(model.dim), gm(model.dim);
    model.gradient(q + h * u, gp);
    model.gradient(q - h * u, gm);
    out = (gp - gm) * (wnorm / (2.0 * h));
    return out;
}

double kinetic_energy(const Vector& p) {
    if (!p.allFinite()) throw DomainError("kinetic_energy: non-finite momentum");
    return 0.5 * p.squaredNorm();
}

double hamiltonian(const TargetModel& model, const PhaseState& z) {
    if (z.position.size() != z.momentum.size())
        throw ContractViolation("hamiltonian: position/momentum dimension mismatch");
    return potential_energy(model, z.position) + kinetic_energy(z.momentum);
}

Vector sample_momentum(Rng& rng, Eigen::Index dim) {
    if (dim <= 0) throw ContractViolation("sample_momentum: dim must be positive");
    return rng.normal_vector(dim);
}

PhaseState sample_exact(const TargetModel& model, Rng& rng) {
    if (!model.has_exact_sampler())
        throw UnsupportedOperation("sample_exact: model has no exact position sampler");
    Vector q = model.exact_position_sampler(rng);
    if (q.size() != model.dim || !q.allFinite())
        throw DomainError("sample_exact: sampler returned an invalid position");
    return PhaseState(std::move(q), sample_momentum(rng, model.dim));
}

TargetModel standard_gaussian(Eigen::Index dim) {
    if (dim <= 0) throw ContractViolation("standard_gaussian: dim must be positive");
    TargetModel m;
    m.name = "standard_gaussian";
    m.dim = dim;
    m.potential = [](const Vector& q) { return 0.5 * q.squaredNorm(); };
    m.gradient = [](const Vector& q, Vector& out) { out = q; };
    m.hessian_vector_product = [](const Vector&, const Vector& w, Vector& out) { out = w; };
    m.exact_position_sampler = [dim](Rng& rng) { return rng.normal_vector(dim); };
    return m;
}

TargetModel scaled_gaussian(Vector scales) {
    if (scales.size() == 0) throw ContractViolation("scaled_gaussian: empty scales");
    if (!scales.allFinite() || (scales.array() <= 0.0).any())
        throw ContractViolation("scaled_gaussian: scales must be positive and finite");
    TargetModel m;
    m.name = "scaled_gaussian";
    m.dim = scales.size();
    Vector inv_var = scales.array().square().inverse();
    m.potential = [inv_var](const Vector& q) {
        return 0.5 * (q.array().square() * inv_var.array()).sum();
    };
    m.gradient = [inv_var](const Vector& q, Vector& out) {
        out = q.array() * inv_var.array();
    };
    m.hessian_vector_product = [inv_var](const Vector&, const Vector& w, Vector& out) {
        out = w.array() * inv_var.array();
    };
    m.exact_position_sampler = [scales](Rng& rng) {
        Vector q = rng.normal_vector(scales.size());
        q.array() *= scales.array();
        return q;
    };
    return m;
}

TargetModel funnel(Eigen::Index n_latent, double scale) {
    if (n_latent < 1) throw ContractViolation("funnel: need at least one latent dimension");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw ContractViolation("funnel: scale must be positive and finite");
    TargetModel m;
    m.name = "funnel";
    m.dim = n_latent + 1;
    const double inv_s2 = 1.0 / (scale * scale);
    const double n = static_cast<double>(n_latent);

    // V(v, x) = v^2/(2 s^2) + e^{-v} |x|^2/2 + (n/2) v; the last term is the
    // log normalizer of the conditional x | v and cannot be dropped.
    m.potential = [inv_s2, n, n_latent](const Vector& q) {
        double v = q[0];
        double sum = q.tail(n_latent).squaredNorm();
        return 0.5 * v * v * inv_s2 + 0.5 * std::exp(-v) * sum + 0.5 * n * v;
    };
    m.gradient = [inv_s2, n, n_latent](const Vector& q, Vector& out) {
        double v = q[0];
        double ev = std::exp(-v);
        double sum = q.tail(n_latent).squaredNorm();
        out[0] = v * inv_s2 - 0.5 * ev * sum + 0.5 * n;
        out.tail(n_latent) = ev * q.tail(n_latent);
    };
    m.hessian_vector_product = [inv_s2, n_latent](const Vector& q, const Vector& w, Vector& out) {
        double v = q[0];
        double ev = std::exp(-v);
        double sum = q.tail(n_latent).squaredNorm();
        double dot = q.tail(n_latent).dot(w.tail(n_latent));
        out[0] = (inv_s2 + 0.5 * ev * sum) * w[0] - ev * dot;
        out.tail(n_latent) = ev * (w.tail(n_latent) - q.tail(n_latent) * w[0]);
    };
    m.exact_position_sampler = [scale, n_latent](Rng& rng) {
        Vector q(n_latent + 1);
        double v = scale * rng.normal();
        q[0] = v;
        double sd = std::exp(0.5 * v);
        for (Eigen::Index i = 1; i <= n_latent; ++i) q[i] = sd * rng.normal();
        return q;
    };
    return m;
}

}  // namespace hmc
