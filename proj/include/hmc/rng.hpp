#pragma once

#include <cstdint>
#include <random>

#include "hmc/types.hpp"

namespace hmc {

// All randomness in the library flows through this wrapper so that a run is a
// pure function of its seed.  Parallel work derives one child seed per shard
// (see derive_seed) instead of sharing a generator.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    // Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

    std::uint64_t integer(std::uint64_t bound) {  // uniform on [0, bound)
        return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
    }

    Vector normal_vector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// SplitMix64-style mixing; gives well-separated child streams for any
// (seed, stream) pair, including stream = 0.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hmc
