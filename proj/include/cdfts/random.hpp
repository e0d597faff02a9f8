#pragma once

#include <cstdint>
#include <random>

namespace cdfts {

/// Portable seeded stream: the raw 64-bit sequence is std::mt19937_64
/// (fully specified by the standard); uniforms take the top 53 bits, and
/// normals use the Box-Muller transform, so the same seed yields the same
/// numbers on every platform.
class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace cdfts
