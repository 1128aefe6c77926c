#pragma once

// Seeded random streams. Each (seed, stream) pair gets an independent
// generator, so per-orbit and per-sample draws do not depend on scheduling.

#include "toruslab/torus_system.hpp"

#include <cstdint>
#include <random>

namespace toruslab {

class SplitRng {
public:
    SplitRng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

    TorusPoint point(int dim) {
        std::vector<double> c(static_cast<std::size_t>(dim));
        for (auto& v : c) v = uniform();
        return TorusPoint(std::move(c));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace toruslab
