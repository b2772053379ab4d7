#ifndef MES_RNG_HPP
#define MES_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

// Deterministic random plumbing. std::mt19937_64 output is fully specified
// by the standard; the uniform/bounded/shuffle transforms below are written
// out explicitly (the std distribution adaptors are implementation-defined),
// so every seeded run is byte-identical on any conforming platform.

namespace mes {

/// Mixes a base seed with a stream index into an independent sub-seed.
/// SplitMix64 finalizer; used for per-chunk and per-column streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in the open interval (0,1); never returns an endpoint.
    double next_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) by rejection, n >= 1.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    /// Fisher-Yates shuffle with explicit bounded draws.
    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(values[i - 1], values[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

/// Midpoint grid u_k = (k - 0.5)/n, k = 1..n.
std::vector<double> midpoint_grid(std::size_t n);

/// Seeded random permutation of the midpoint grid.
std::vector<double> permuted_midpoint_grid(std::size_t n, std::uint64_t seed);

}  // namespace mes

#endif
