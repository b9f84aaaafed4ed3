// Deterministic RNG with per-trial substreams. std::random distributions are
// implementation-defined, so all draws are generated here from raw 64-bit
// output to keep sequences stable across platforms and library versions.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace fpdetect {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// Stable 64-bit mix for deriving independent stream seeds. Multiplication by
// an odd constant is a bijection mod 2^64, so distinct indices never collide
// on the same master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1))).next();
}

// xoshiro256** seeded through SplitMix64.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_seed(seed, index));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5ULL, 7) * 9ULL;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;
        std::uint64_t x;
        do { x = next_u64(); } while (x < threshold);
        return x % bound;
    }

    // Standard normal via Box-Muller. The sine branch is discarded to keep
    // the stream layout simple (two uniforms per draw, always).
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0,1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape boost for shape < 1.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = 1.0 - uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = 1.0 - uniform01();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
        }
    }

    // Symmetric Dirichlet over k categories.
    std::vector<double> dirichlet(double alpha, std::size_t k) {
        std::vector<double> w(k);
        double total = 0.0;
        for (auto& wi : w) total += (wi = gamma(alpha));
        if (total <= 0.0) {
            for (auto& wi : w) wi = 1.0 / double(k);
        } else {
            for (auto& wi : w) wi /= total;
        }
        return w;
    }

    // Index draw from nonnegative weights (need not be normalized).
    std::size_t categorical(std::span<const double> weights) {
        if (weights.empty()) throw std::invalid_argument("categorical: empty weight vector");
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform01() * total;
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            cum += weights[i];
            if (u < cum) return i;
        }
        return weights.size() - 1;
    }

    // Partial Fisher-Yates: first k slots of a shuffled 0..n-1.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + std::size_t(uniform_below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace fpdetect
