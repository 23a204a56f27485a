#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "insector/grid.hpp"
#include "insector/rng.hpp"

namespace insector {

// One propagation ray of the MISO channel. omega_e / omega_a are beamspace
// angles in [0, 2*pi); in on-grid mode they are integer multiples of 2*pi/N.
struct Ray {
    cdouble gain;
    double omega_e = 0.0;
    double omega_a = 0.0;
    int tap = 0;
};

// [1, e^{j*w}, ..., e^{j*(n-1)*w}]^T
inline std::vector<cdouble> vandermonde(double omega, int n) {
    if (n < 1) throw std::invalid_argument("vandermonde: n must be >= 1");
    std::vector<cdouble> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[k] = cdouble(std::cos(k * omega), std::sin(k * omega));
    return v;
}

// Beamspace angle that puts a ray exactly on grid cell (p, q) of the N x N
// beamspace under the fixed DFT convention.
inline double grid_angle(int index, int n) {
    return 2.0 * kPi * ComplexGrid::mod(-index, n) / n;
}

inline Ray ray_at_grid(int p, int q, cdouble gain, int n, int tap = 0) {
    return Ray{gain, grid_angle(p, n), grid_angle(q, n), tap};
}

// Convert physical departure angles (radians) to beamspace angles.
inline std::pair<double, double> physical_to_beamspace(double theta_e, double theta_a) {
    const double we = kPi * std::sin(theta_e) * std::cos(theta_a);
    const double wa = kPi * std::sin(theta_e) * std::sin(theta_a);
    auto wrap = [](double w) {
        w = std::fmod(w, 2.0 * kPi);
        return w < 0.0 ? w + 2.0 * kPi : w;
    };
    return {wrap(we), wrap(wa)};
}

enum class ChannelMode { on_grid, off_grid };

// L-tap wideband sparse channel; taps[l] = sum of rank-one ray contributions.
struct ChannelRealization {
    int n = 0;
    ChannelMode mode = ChannelMode::on_grid;
    std::vector<Ray> rays;
    std::vector<ComplexGrid> taps;

    int l_taps() const { return static_cast<int>(taps.size()); }

    ComplexGrid sum() const {
        ComplexGrid s(n, n);
        for (const ComplexGrid& h : taps) s += h;
        return s;
    }
};

inline ChannelRealization synth_channel(const std::vector<Ray>& rays, int n, int l,
                                        ChannelMode mode = ChannelMode::on_grid) {
    if (n < 1 || l < 1) throw std::invalid_argument("synth_channel: n and l must be >= 1");
    ChannelRealization ch;
    ch.n = n;
    ch.mode = mode;
    ch.rays = rays;
    ch.taps.assign(static_cast<std::size_t>(l), ComplexGrid(n, n));
    for (const Ray& ray : rays) {
        if (ray.tap < 0 || ray.tap >= l)
            throw std::invalid_argument("synth_channel: ray tap index out of range");
        const std::vector<cdouble> ae = vandermonde(ray.omega_e, n);
        const std::vector<cdouble> aa = vandermonde(ray.omega_a, n);
        ComplexGrid& h = ch.taps[static_cast<std::size_t>(ray.tap)];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) h(i, j) += ray.gain * ae[i] * aa[j];
    }
    return ch;
}

// X = U_N^* H U_N^*, so that H = U_N X U_N round-trips.
inline ComplexGrid beamspace(const ComplexGrid& h) {
    if (!h.square()) throw std::invalid_argument("beamspace: grid must be square");
    return idft2(h);
}

struct RandomChannelConfig {
    int k_min = 1;
    int k_max = 4;
    ChannelMode mode = ChannelMode::off_grid;
};

// Ray count uniform on [k_min, k_max], gains CN(0, 1/k) so the expected
// channel energy is N^2 regardless of k, angles uniform (grid-aligned in
// on-grid mode), tap indices uniform on [L].
inline ChannelRealization random_channel(const RandomChannelConfig& cfg, int n, int l, Rng& rng) {
    if (cfg.k_min < 1 || cfg.k_max < cfg.k_min)
        throw std::invalid_argument("random_channel: invalid ray count range");
    const int k = cfg.k_min + rng.uniform_int(cfg.k_max - cfg.k_min + 1);
    std::vector<Ray> rays(static_cast<std::size_t>(k));
    const double gain_sigma = 1.0 / std::sqrt(static_cast<double>(k));
    for (Ray& ray : rays) {
        ray.gain = rng.complex_normal(gain_sigma);
        if (cfg.mode == ChannelMode::on_grid) {
            ray.omega_e = 2.0 * kPi * rng.uniform_int(n) / n;
            ray.omega_a = 2.0 * kPi * rng.uniform_int(n) / n;
        } else {
            ray.omega_e = rng.uniform(0.0, 2.0 * kPi);
            ray.omega_a = rng.uniform(0.0, 2.0 * kPi);
        }
        ray.tap = rng.uniform_int(l);
    }
    return synth_channel(rays, n, l, cfg.mode);
}

}  // namespace insector
