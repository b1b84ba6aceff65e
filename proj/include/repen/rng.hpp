#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace repen {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Mixes a master seed with a path of indices (replication, purpose, ...) into
/// an independent stream seed. Replication r of a run with master seed M uses
/// derive_seed(M, {r, tag...}), so streams do not depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t acc = splitmix64(master);
    for (std::uint64_t v : path) acc = splitmix64(acc ^ splitmix64(v + 0xA5A5A5A5A5A5A5A5ULL));
    return acc;
}

/// Deterministic random stream. Uniform and Gaussian variates are generated
/// from raw mt19937_64 output (53-bit uniforms, Box-Muller) rather than the
/// standard-library distributions, whose sequences are implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the spare variate is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0,1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = eng_();
            if (r >= threshold) return r % bound;
        }
    }

    /// In-place Fisher-Yates; identical sequence on every standard library.
    template <class RandomIt>
    void shuffle(RandomIt first, RandomIt last) {
        const auto n = last - first;
        for (auto i = n - 1; i > 0; --i) {
            const auto j = static_cast<decltype(i)>(uniform_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(first[i], first[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace repen
