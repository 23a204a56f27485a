#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "insector/grid.hpp"

namespace insector {

// Pipeline stages get their own RNG streams so that trial results do not
// depend on evaluation order or on how many draws an earlier stage consumed.
enum class RngStream : std::uint64_t {
    channel = 1,
    sls_noise = 2,
    shift_draw = 3,
    cs_noise = 4,
    weight_init = 5,
    generic = 6,
};

// Small counter-derived generator (SplitMix64 core). All distributions are
// implemented here rather than with <random> so that a (seed, trial, stage)
// triple maps to the same draws on every platform and run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9E3779B97F4A7C15ULL)) {}

    static Rng for_stream(std::uint64_t base_seed, std::uint64_t trial, RngStream stage) {
        std::uint64_t s = mix(base_seed);
        s = mix(s ^ mix(trial + 0x1000193ULL));
        s = mix(s ^ mix(static_cast<std::uint64_t>(stage) + 0x811C9DC5ULL));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    int uniform_int(int n) {
        if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<int>(v % un);
    }

    // standard normal via Box-Muller
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * kPi * uniform();
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    // CN(0, sigma^2): E|v|^2 = sigma^2
    cdouble complex_normal(double sigma) {
        const double s = sigma / std::sqrt(2.0);
        return cdouble(s * normal(), s * normal());
    }

    // m distinct values from [0, n), order randomized (partial Fisher-Yates)
    std::vector<int> sample_without_replacement(int n, int m) {
        if (m < 0 || m > n)
            throw std::invalid_argument("Rng::sample_without_replacement: m out of range");
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<int> out(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const int j = i + uniform_int(n - i);
            std::swap(pool[i], pool[j]);
            out[i] = pool[i];
        }
        return out;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace insector
