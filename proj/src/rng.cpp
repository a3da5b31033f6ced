#include "roughdrift/rng.hpp"

#include <cmath>

namespace rd {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Eigen::ArrayXd Rng::gaussian_vector(int n) {
    Eigen::ArrayXd out(n);
    for (int i = 0; i < n; ++i) out[i] = gaussian();
    return out;
}

int Rng::uniform_int(int n) {
    // Rejection-free modulo bias is negligible for the desk-scale n used
    // here, but stay exact anyway via rejection sampling.
    const std::uint64_t nn = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % nn;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return static_cast<int>(v % nn);
}

Rng block_rng(std::uint64_t seed, std::uint64_t block) {
    // Mix the pair (seed, block) through splitmix64 twice; the resulting
    // 64-bit value seeds the block's own engine.
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (block + 1));
    (void)splitmix64_next(s);
    const std::uint64_t derived = splitmix64_next(s);
    return Rng(derived);
}

}  // namespace rd
