#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "insector/channel.hpp"
#include "insector/codebook.hpp"
#include "insector/grid.hpp"
#include "insector/rng.hpp"
#include "insector/sector.hpp"

namespace insector {

struct SlsResult {
    std::vector<double> powers;  // |y_s|^2 per sector (tap-summed when wideband)
    int best_sector = 0;         // argmax, ties to the lowest index
};

// One noisy measurement per sector beam; the sector of interest is the one
// with the highest received power. Wideband channels accumulate per-tap
// measurement powers with independent noise draws.
inline SlsResult sls_measure(const ChannelRealization& ch,
                             const std::vector<ComplexGrid>& codebook, double sigma, Rng& rng) {
    if (codebook.empty()) throw std::invalid_argument("sls_measure: empty codebook");
    if (sigma < 0.0) throw std::invalid_argument("sls_measure: sigma must be >= 0");
    SlsResult res;
    res.powers.reserve(codebook.size());
    for (const ComplexGrid& p : codebook) {
        double power = 0.0;
        for (const ComplexGrid& h : ch.taps) {
            const cdouble y = inner_product(h, p) + rng.complex_normal(sigma);
            power += std::norm(y);
        }
        res.powers.push_back(power);
    }
    res.best_sector = 0;
    for (std::size_t s = 1; s < res.powers.size(); ++s)
        if (res.powers[s] > res.powers[static_cast<std::size_t>(res.best_sector)])
            res.best_sector = static_cast<int>(s);
    return res;
}

inline std::vector<ComplexGrid> codebook_grids(const Codebook& book) {
    std::vector<ComplexGrid> grids;
    grids.reserve(book.awms.size());
    for (const Awm& a : book.awms) grids.push_back(a.grid);
    return grids;
}

// Quantized contiguous-sector baseline: the ideal AWM whose mask is the
// indicator of the rho_e x rho_a beamspace block anchored at
// (k_e*rho_e, k_a*rho_a), with each entry snapped onto the q-bit alphabet.
// Quantization reintroduces out-of-block leakage; that leakage is the point
// of comparison with the comb construction.
inline std::vector<ComplexGrid> contiguous_baseline_codebook(int n, int n_e, int n_a, int q) {
    if (n % n_e != 0 || n % n_a != 0)
        throw std::invalid_argument("contiguous_baseline_codebook: N_e, N_a must divide N");
    const int rho_e = n / n_e;
    const int rho_a = n / n_a;
    const double amp = 1.0 / std::sqrt(static_cast<double>(rho_e) * rho_a);
    std::vector<ComplexGrid> grids;
    grids.reserve(static_cast<std::size_t>(n_e) * n_a);
    for (int ke = 0; ke < n_e; ++ke) {
        for (int ka = 0; ka < n_a; ++ka) {
            ComplexGrid mask(n, n);
            for (int i = 0; i < rho_e; ++i)
                for (int j = 0; j < rho_a; ++j) mask(ke * rho_e + i, ka * rho_a + j) = amp;
            // invert the mask relation Z ~ idft2(FC(P)): P = FC(dft2(mask))
            ComplexGrid ideal = flip_conjugate(dft2(mask));
            grids.push_back(project_to_qq(ideal, q, 1.0 / n));
        }
    }
    return grids;
}

// Beamspace block covered by baseline sector s (row-major anchor order).
inline bool contiguous_block_contains(int s, int p, int q, int n, int n_e, int n_a) {
    const int rho_e = n / n_e;
    const int rho_a = n / n_a;
    const int ke = s / n_a;
    const int ka = s % n_a;
    return p >= ke * rho_e && p < (ke + 1) * rho_e && q >= ka * rho_a && q < (ka + 1) * rho_a;
}

}  // namespace insector
