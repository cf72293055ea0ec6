#pragma once

#include <Eigen/Dense>

namespace hmc {

using Vector = Eigen::VectorXd;

// A point in phase space.  Position and momentum always have equal length.
struct PhaseState {
    Vector position;
    Vector momentum;

    PhaseState() = default;
    PhaseState(Vector q, Vector p) : position(std::move(q)), momentum(std::move(p)) {}

    Eigen::Index dim() const { return position.size(); }

    bool finite() const {
        return position.allFinite() && momentum.allFinite();
    }
};

}  // namespace hmc
