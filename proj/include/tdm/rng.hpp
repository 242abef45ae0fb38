#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace tdm {

// splitmix64 finalizer; used to derive independent seeds from (root, a, b)
// so results do not depend on execution order.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(root) ^ a) ^ b);
}

/// Deterministic random source. mt19937_64 output is fully specified by the
/// standard; the helpers below avoid std::*_distribution, whose results vary
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). bound must be positive.
    int next_int(int bound) {
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(bound));
    }

    /// Standard normal via Box-Muller (stateless variant, two uniforms per draw).
    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// k distinct values from {0, .., n-1}, returned in ascending order.
    std::vector<int> sample_distinct(int k, int n) {
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        if (k > n) k = n;
        for (int i = 0; i < k; ++i) {
            const int j = i + next_int(n - i);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(k));
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace tdm
