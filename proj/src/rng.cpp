#include "mes/rng.hpp"

namespace mes {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> midpoint_grid(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    }
    return u;
}

std::vector<double> permuted_midpoint_grid(std::size_t n, std::uint64_t seed) {
    auto u = midpoint_grid(n);
    Rng rng(seed);
    rng.shuffle(std::span<double>(u));
    return u;
}

}  // namespace mes
