#pragma once

// Deterministic random number generation.  Every stochastic routine in the
// library draws through this wrapper, whose arithmetic is fully pinned down
// (explicit 53-bit uniforms, explicit Box-Muller) so that a fixed seed gives
// bit-identical streams on any conforming platform — std::normal_distribution
// is avoided on purpose because its algorithm is implementation-defined.

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace rd {

/// One step of the splitmix64 sequence; used to derive well-separated
/// sub-stream seeds from a user seed.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// Deterministic Gaussian/uniform stream over std::mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0,1] (safe under log).
    double uniform_pos() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; caches the second member of each pair.
    double gaussian();

    /// Vector of n independent standard normals.
    Eigen::ArrayXd gaussian_vector(int n);

    /// Uniform integer in [0, n).
    int uniform_int(int n);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Sub-stream RNG for block `block` of the run seeded by `seed`.  Blocks are
/// statistically independent and their assignment to workers is fixed, so
/// results do not depend on the thread count.
Rng block_rng(std::uint64_t seed, std::uint64_t block);

}  // namespace rd
