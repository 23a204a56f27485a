#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "insector/channel.hpp"
#include "insector/grid.hpp"
#include "insector/sector.hpp"

namespace insector {

struct Beamformer {
    ComplexGrid grid;
    bool degenerate_flat = false;  // estimate was identically zero
};

// Phase-conjugating beamformer F_ij = exp(j*phase(H_hat_ij))/N, quantized to
// q bits. q = 0 selects the unconstrained (infinite-resolution) variant, for
// which |<F, H_hat>| = sum |H_hat_ij| / N exactly.
inline Beamformer beamformer_from_estimate(const ComplexGrid& h_hat, int q) {
    if (!h_hat.square()) throw std::invalid_argument("beamformer_from_estimate: grid must be square");
    const int n = h_hat.rows();
    const double mag = 1.0 / n;
    Beamformer out{ComplexGrid(n, n), h_hat.squared_norm() == 0.0};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double phase = std::arg(h_hat(i, j));
            if (q <= 0) {
                out.grid(i, j) = mag * cdouble(std::cos(phase), std::sin(phase));
            } else {
                out.grid(i, j) = qq_value(quantize_phase_index(phase, q), q, mag);
            }
        }
    }
    return out;
}

// h_eff[l] = <H[l], F>
inline std::vector<cdouble> effective_channel(const ChannelRealization& ch,
                                              const ComplexGrid& f) {
    std::vector<cdouble> h(static_cast<std::size_t>(ch.l_taps()));
    for (int l = 0; l < ch.l_taps(); ++l) h[static_cast<std::size_t>(l)] = inner_product(ch.taps[static_cast<std::size_t>(l)], f);
    return h;
}

struct WaterfillingResult {
    std::vector<double> gains;   // g_k = |DFT(h_eff)|^2 / sigma^2
    std::vector<double> powers;  // optimal per-subcarrier allocation
    double rate = 0.0;           // bits/s/Hz
};

// Waterfilling over the n_fft-point frequency response of the zero-padded
// tap vector. The water level is solved exactly by sorting the inverse gains.
inline WaterfillingResult waterfilling(const std::vector<cdouble>& h_eff, double sigma,
                                       int n_fft, double total_power) {
    if (n_fft < static_cast<int>(h_eff.size()))
        throw std::invalid_argument("waterfilling: n_fft must be >= number of taps");
    if (!(total_power > 0.0)) throw std::invalid_argument("waterfilling: total_power must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("waterfilling: sigma must be > 0");

    WaterfillingResult out;
    std::vector<cdouble> padded(static_cast<std::size_t>(n_fft));
    std::copy(h_eff.begin(), h_eff.end(), padded.begin());
    detail::transform_1d(padded, -1);  // unnormalized frequency response

    out.gains.resize(static_cast<std::size_t>(n_fft));
    out.powers.assign(static_cast<std::size_t>(n_fft), 0.0);
    for (int k = 0; k < n_fft; ++k) out.gains[static_cast<std::size_t>(k)] = std::norm(padded[static_cast<std::size_t>(k)]) / (sigma * sigma);

    // sort subcarriers by inverse gain, strongest first
    std::vector<int> order(static_cast<std::size_t>(n_fft));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return out.gains[static_cast<std::size_t>(a)] > out.gains[static_cast<std::size_t>(b)];
    });

    int active = 0;
    double level = 0.0;
    double inv_sum = 0.0;
    for (int t = 0; t < n_fft; ++t) {
        const double g = out.gains[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])];
        if (g <= 0.0) break;
        const double inv = 1.0 / g;
        const double candidate = (total_power + inv_sum + inv) / (t + 1);
        if (candidate <= inv) break;  // carrier t would get negative power
        inv_sum += inv;
        active = t + 1;
        level = candidate;
    }
    if (active == 0) return out;  // all-zero response

    double rate = 0.0;
    for (int t = 0; t < active; ++t) {
        const int k = order[static_cast<std::size_t>(t)];
        const double g = out.gains[static_cast<std::size_t>(k)];
        const double p = level - 1.0 / g;
        out.powers[static_cast<std::size_t>(k)] = p;
        rate += std::log2(1.0 + p * g);
    }
    out.rate = rate / n_fft;
    return out;
}

inline double waterfilling_rate(const std::vector<cdouble>& h_eff, double sigma, int n_fft,
                                double total_power) {
    return waterfilling(h_eff, sigma, n_fft, total_power).rate;
}

// Single-pair normalized error; batch experiments average numerator and
// denominator separately before dividing.
inline double nmse(const ComplexGrid& truth, const ComplexGrid& estimate) {
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
        throw std::invalid_argument("nmse: shape mismatch");
    const double den = truth.squared_norm();
    if (den == 0.0) throw std::invalid_argument("nmse: zero-energy reference");
    return (truth - estimate).squared_norm() / den;
}

}  // namespace insector
