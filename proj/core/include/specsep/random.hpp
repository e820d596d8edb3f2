// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace specsep {

/// Seeded generator with platform-independent conversions. The engine is
/// std::mt19937_64 (fully specified by the standard); the distributions are
/// implemented here because the standard library ones are not portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : m_engine(seed) {}

    std::uint64_t next_u64() { return m_engine(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(m_engine() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller (one value per call).
    double normal();

    /// Derives an independent seed for a named sub-stream.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

private:
    std::mt19937_64 m_engine;
};

}  // namespace specsep
