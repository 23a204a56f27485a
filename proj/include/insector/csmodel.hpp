#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "insector/channel.hpp"
#include "insector/grid.hpp"
#include "insector/rng.hpp"
#include "insector/sector.hpp"
#include "insector/shifts.hpp"

namespace insector {

// Normalized convolutional measurement kernel: entry (r,c) equals
// <H, circshift2(P, r, c)> / N. Equal to U_N (X .* unit_mask(P)) U_N.
inline ComplexGrid measurement_kernel(const ComplexGrid& h, const ComplexGrid& awm_grid) {
    ComplexGrid k = circconv2(h, flip_conjugate(awm_grid));
    k *= 1.0 / static_cast<double>(h.rows());
    return k;
}

// One in-sector CS problem instance. Everything lives in the normalized
// measurement scale y = <H, P[m]> / N, which makes y = A_eff x exact and the
// column norms d_i = (sqrt(M)/N) |z_sub(i)| with sum d_i^2 = M/N^2.
struct CsInstance {
    int n = 0;
    SectorSpec sector;
    std::vector<std::pair<int, int>> comb;  // beamspace cells, column order
    std::vector<int> l_indices;             // vectorized indices q*N + p
    std::vector<cdouble> z_sub;             // unit-energy mask on the comb
    ComplexGrid a_eff;                      // M x (rho_e*rho_a)
    std::vector<cdouble> y;                 // M measurements
    double sigma = 0.0;                     // noise std in the normalized scale

    int measurement_count() const { return static_cast<int>(y.size()); }
    int column_count() const { return static_cast<int>(z_sub.size()); }

    std::vector<double> column_norms() const {
        const double scale = std::sqrt(static_cast<double>(measurement_count())) / n;
        std::vector<double> d(z_sub.size());
        for (std::size_t i = 0; i < z_sub.size(); ++i) d[i] = scale * std::abs(z_sub[i]);
        return d;
    }
};

// Effective CS matrix: A(m,i) = (1/N) e^{-j*2*pi*(r[m]*p_i + c[m]*q_i)/N} z_sub(i).
inline ComplexGrid build_effective_matrix(const ShiftSet& shifts,
                                          const std::vector<std::pair<int, int>>& comb,
                                          const std::vector<cdouble>& z_sub, int n) {
    const int m_count = shifts.count();
    const int k_count = static_cast<int>(comb.size());
    ComplexGrid a(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        const auto& [r, c] = shifts.shifts[static_cast<std::size_t>(m)];
        for (int i = 0; i < k_count; ++i) {
            const auto& [p, q] = comb[static_cast<std::size_t>(i)];
            const double phase =
                -2.0 * kPi *
                (static_cast<double>(r) * p + static_cast<double>(c) * q) / n;
            a(m, i) = (1.0 / n) * cdouble(std::cos(phase), std::sin(phase)) *
                      z_sub[static_cast<std::size_t>(i)];
        }
    }
    return a;
}

// Mutual coherence from the Gram matrix of the effective CS matrix
// (norm-normalized inner products).
inline double gram_coherence(const ComplexGrid& a_eff) {
    const int m = a_eff.rows(), k = a_eff.cols();
    std::vector<double> norms(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += std::norm(a_eff(r, i));
        norms[static_cast<std::size_t>(i)] = std::sqrt(s);
    }
    double mu = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            cdouble dot{};
            for (int r = 0; r < m; ++r) dot += std::conj(a_eff(r, i)) * a_eff(r, j);
            const double den = norms[static_cast<std::size_t>(i)] * norms[static_cast<std::size_t>(j)];
            if (den > 0.0) mu = std::max(mu, std::abs(dot) / den);
        }
    }
    return mu;
}

// Acquire M in-sector measurements by circularly shifting the base AWM.
// sigma is the physical per-measurement noise std in the <H,P> scale. For
// wideband channels (L > 1) the tap projections are summed into the DC
// subcarrier and each tap carries independent noise CN(0, sigma^2/n_seq),
// n_seq being the correlator spreading gain.
inline CsInstance assemble_cs(const ChannelRealization& ch, const Awm& awm,
                              const ShiftSet& shifts, double sigma, Rng& rng, int n_seq = 1) {
    if (sigma < 0.0) throw std::invalid_argument("assemble_cs: sigma must be >= 0");
    if (n_seq < 1) throw std::invalid_argument("assemble_cs: n_seq must be >= 1");
    if (ch.n != awm.sector.n || shifts.n != awm.sector.n)
        throw std::invalid_argument("assemble_cs: dimension mismatch");
    for (const auto& [r, c] : shifts.shifts)
        if (r < 0 || r >= ch.n || c < 0 || c >= ch.n)
            throw std::out_of_range("assemble_cs: shift outside [N] x [N]");

    CsInstance inst;
    inst.n = ch.n;
    inst.sector = awm.sector;
    inst.comb = awm.sector.comb_indices();
    inst.l_indices.reserve(inst.comb.size());
    for (const auto& [p, q] : inst.comb) inst.l_indices.push_back(q * ch.n + p);

    const ComplexGrid zu = unit_mask(awm.grid);
    inst.z_sub.reserve(inst.comb.size());
    for (const auto& [p, q] : inst.comb) inst.z_sub.push_back(zu(p, q));

    inst.a_eff = build_effective_matrix(shifts, inst.comb, inst.z_sub, ch.n);

    const int l = ch.l_taps();
    const ComplexGrid kernel = measurement_kernel(ch.sum(), awm.grid);
    const double noise_std =
        (l == 1) ? sigma / ch.n
                 : sigma * std::sqrt(static_cast<double>(l) / n_seq) / ch.n;
    inst.sigma = noise_std;
    inst.y.reserve(shifts.shifts.size());
    for (const auto& [r, c] : shifts.shifts)
        inst.y.push_back(kernel(r, c) + rng.complex_normal(noise_std));
    return inst;
}

// Ground-truth beamspace values on the comb, in instance column order.
inline std::vector<cdouble> comb_values(const ComplexGrid& beamspace_grid,
                                        const SectorSpec& s) {
    std::vector<cdouble> out;
    out.reserve(static_cast<std::size_t>(s.comb_size()));
    for (const auto& [p, q] : s.comb_indices()) out.push_back(beamspace_grid(p, q));
    return out;
}

}  // namespace insector
