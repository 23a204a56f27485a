#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "insector/grid.hpp"

namespace insector {

inline bool is_pow2(int n) { return detail::is_pow2(n); }

inline int log2_exact(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

// --- q-bit phase alphabet -------------------------------------------------
//
// Q_q = { magnitude * e^{j*2*pi*l/2^q} : l in [2^q] }. Antenna weights use
// magnitude 1/N; the per-sector combination weights use 1/sqrt(rho_e*rho_a)
// so the assembled AWM lands back in Q_q.

inline int phase_levels(int q) { return 1 << q; }

// Nearest phase index on the 2^q grid; exact ties go to the smaller index.
inline int quantize_phase_index(double phase, int q) {
    const int levels = phase_levels(q);
    const double step = 2.0 * kPi / levels;
    double f = phase / step;
    f -= std::floor(f / levels) * levels;  // into [0, levels)
    const int lo = static_cast<int>(std::floor(f));
    const double frac = f - lo;
    int idx = (frac > 0.5) ? lo + 1 : lo;
    return idx % levels;
}

inline cdouble qq_value(int index, int q, double magnitude) {
    const double phase = 2.0 * kPi * index / phase_levels(q);
    return magnitude * cdouble(std::cos(phase), std::sin(phase));
}

// Distance from v to the closest point of the q-bit alphabet of the given
// magnitude. Used as a construction tripwire.
inline double qq_distance(cdouble v, int q, double magnitude) {
    const int idx = quantize_phase_index(std::arg(v), q);
    return std::abs(v - qq_value(idx, q, magnitude));
}

inline ComplexGrid project_to_qq(const ComplexGrid& g, int q, double magnitude) {
    ComplexGrid out(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            out(i, j) = qq_value(quantize_phase_index(std::arg(g(i, j)), q), q, magnitude);
    return out;
}

// --- sectors ----------------------------------------------------------------

// A comb-like sector: the beamspace lattice anchored at (k_e, k_a) with
// strides (N_e, N_a). Sectors over all anchors partition [N] x [N].
struct SectorSpec {
    int n = 0;
    int n_e = 0;
    int n_a = 0;
    int k_e = 0;
    int k_a = 0;

    SectorSpec() = default;
    SectorSpec(int n_, int n_e_, int n_a_, int k_e_, int k_a_)
        : n(n_), n_e(n_e_), n_a(n_a_), k_e(k_e_), k_a(k_a_) {
        if (n <= 0 || n_e <= 0 || n_a <= 0)
            throw std::invalid_argument("SectorSpec: dimensions must be positive");
        if (n % n_e != 0 || n % n_a != 0)
            throw std::invalid_argument("SectorSpec: N_e and N_a must divide N");
        if (!is_pow2(n_e * n_a))
            throw std::invalid_argument("SectorSpec: N_e*N_a must be a power of 2");
        if (k_e < 0 || k_e >= n_e || k_a < 0 || k_a >= n_a)
            throw std::invalid_argument("SectorSpec: anchor out of range");
    }

    int rho_e() const { return n / n_e; }
    int rho_a() const { return n / n_a; }
    int sector_count() const { return n_e * n_a; }
    int sector_index() const { return n_a * k_e + k_a; }
    int comb_size() const { return rho_e() * rho_a(); }

    // Comb indices in (row-block, col-block) order; this ordering also fixes
    // the column order of the effective CS matrix.
    std::vector<std::pair<int, int>> comb_indices() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(static_cast<std::size_t>(comb_size()));
        for (int bn = 0; bn < rho_e(); ++bn)
            for (int bm = 0; bm < rho_a(); ++bm)
                out.emplace_back(bn * n_e + k_e, bm * n_a + k_a);
        return out;
    }

    bool contains(int p, int q) const {
        return ComplexGrid::mod(p, n_e) == k_e && ComplexGrid::mod(q, n_a) == k_a;
    }
};

inline std::vector<SectorSpec> all_sectors(int n, int n_e, int n_a) {
    std::vector<SectorSpec> out;
    out.reserve(static_cast<std::size_t>(n_e) * n_a);
    for (int ke = 0; ke < n_e; ++ke)
        for (int ka = 0; ka < n_a; ++ka) out.emplace_back(n, n_e, n_a, ke, ka);
    return out;
}

// Sector index owning beamspace cell (p, q).
inline int owning_sector(int p, int q, int n_e, int n_a) {
    return n_a * ComplexGrid::mod(p, n_e) + ComplexGrid::mod(q, n_a);
}

// --- construction steps -----------------------------------------------------

// C_s: outer product of the k_e-th column of U_{N_e} with the k_a-th column
// of U_{N_a}; its angle-domain image has a single 1 at (k_e, k_a).
inline ComplexGrid building_block(const SectorSpec& s) {
    ComplexGrid c(s.n_e, s.n_a);
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.n_e) * s.n_a);
    for (int i = 0; i < s.n_e; ++i) {
        for (int j = 0; j < s.n_a; ++j) {
            const double phase =
                -2.0 * kPi * (static_cast<double>(i) * s.k_e / s.n_e +
                              static_cast<double>(j) * s.k_a / s.n_a);
            c(i, j) = scale * cdouble(std::cos(phase), std::sin(phase));
        }
    }
    return c;
}

inline ComplexGrid upsampled_block(const SectorSpec& s) {
    return upsample2(building_block(s), s.rho_e(), s.rho_a());
}

inline double weight_magnitude(const SectorSpec& s) {
    return 1.0 / std::sqrt(static_cast<double>(s.comb_size()));
}

// A base AWM together with the sector it illuminates and the combination
// weights that produced it.
struct Awm {
    SectorSpec sector;
    int q = 1;
    ComplexGrid grid;     // N x N, entries in Q_q (magnitude 1/N)
    ComplexGrid weights;  // rho_e x rho_a, magnitude 1/sqrt(rho_e*rho_a)
};

// P_s = sum_{l,m} W_{lm} * circshift2(upsampled block, l, m). Because the
// shifted copies have complementary supports this reduces to one product per
// entry. Throws if any resulting entry leaves the q-bit alphabet, which
// would signal a convention mismatch between W and the building block.
inline Awm assemble_awm(const SectorSpec& s, const ComplexGrid& weights, int q) {
    if (weights.rows() != s.rho_e() || weights.cols() != s.rho_a())
        throw std::invalid_argument("assemble_awm: weight matrix must be rho_e x rho_a");
    const double wmag = weight_magnitude(s);
    for (int l = 0; l < weights.rows(); ++l)
        for (int m = 0; m < weights.cols(); ++m)
            if (qq_distance(weights(l, m), q, wmag) > 1e-9)
                throw std::invalid_argument("assemble_awm: weight entry off the Q_q grid");

    const ComplexGrid block = building_block(s);
    const double awm_mag = 1.0 / s.n;
    ComplexGrid p(s.n, s.n);
    for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
            p(i, j) = weights(i % s.rho_e(), j % s.rho_a()) * block(i / s.rho_e(), j / s.rho_a());
            if (qq_distance(p(i, j), q, awm_mag) > 1e-9)
                throw std::runtime_error("assemble_awm: AWM entry off the Q_q grid");
        }
    }
    return Awm{s, q, std::move(p), weights};
}

// Spectral mask Z = N * U_N^* FC(P) U_N^*; its support is the sector the
// beam illuminates.
inline ComplexGrid spectral_mask(const ComplexGrid& awm_grid) {
    if (!awm_grid.square()) throw std::invalid_argument("spectral_mask: grid must be square");
    ComplexGrid z = idft2(flip_conjugate(awm_grid));
    z *= static_cast<double>(awm_grid.rows());
    return z;
}

// Unit-energy variant used by the CS model (||vec||_2 = ||P||_F).
inline ComplexGrid unit_mask(const ComplexGrid& awm_grid) {
    return idft2(flip_conjugate(awm_grid));
}

// max/min in-sector mask magnitude; +inf when some comb entry vanishes.
inline double uniformity_ratio(const ComplexGrid& mask, const SectorSpec& s) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& [p, q] : s.comb_indices()) {
        const double v = std::abs(mask(p, q));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo <= 1e-300) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

struct SpectralMask {
    ComplexGrid grid;
    SectorSpec sector;
    double uniformity = 0.0;
};

inline SpectralMask make_spectral_mask(const Awm& awm) {
    SpectralMask m{spectral_mask(awm.grid), awm.sector, 0.0};
    m.uniformity = uniformity_ratio(m.grid, awm.sector);
    return m;
}

// T(p,q) = sum_{l,m} W_{lm} e^{j*2*pi*(l*p + m*q)/N}, the modulation profile
// whose conjugate shapes the mask on the comb.
inline ComplexGrid t_matrix(const SectorSpec& s, const ComplexGrid& weights) {
    ComplexGrid pad(s.n, s.n);
    for (int l = 0; l < weights.rows(); ++l)
        for (int m = 0; m < weights.cols(); ++m) pad(l, m) = weights(l, m);
    ComplexGrid t = idft2(pad);
    t *= static_cast<double>(s.n);
    return t;
}

// Compact rho_e x rho_a form of T on the comb:
//   T_sub = U_{rho_e}^* D(2*pi*k_e/N) W D(2*pi*k_a/N) U_{rho_a}^*,
// with t_matrix(s,W) at comb cell (bn,bm) equal to sqrt(rho_e*rho_a) *
// T_sub(bn,bm). Norm-preserving in W, which makes it the natural objective
// space for weight optimization.
inline ComplexGrid t_submatrix(const SectorSpec& s, const ComplexGrid& weights) {
    ComplexGrid m(weights.rows(), weights.cols());
    for (int l = 0; l < weights.rows(); ++l) {
        for (int mm = 0; mm < weights.cols(); ++mm) {
            const double phase =
                2.0 * kPi * (static_cast<double>(l) * s.k_e + static_cast<double>(mm) * s.k_a) /
                s.n;
            m(l, mm) = weights(l, mm) * cdouble(std::cos(phase), std::sin(phase));
        }
    }
    return detail::fourier2(m, +1);
}

// Inverse of t_submatrix: recover the (unquantized) weight matrix that
// produces a given comb profile.
inline ComplexGrid weights_from_t_submatrix(const SectorSpec& s, const ComplexGrid& t_sub) {
    ComplexGrid m = detail::fourier2(t_sub, -1);
    for (int l = 0; l < m.rows(); ++l) {
        for (int mm = 0; mm < m.cols(); ++mm) {
            const double phase = -2.0 * kPi * (static_cast<double>(l) * s.k_e) / s.n -
                                 2.0 * kPi * (static_cast<double>(mm) * s.k_a) / s.n;
            m(l, mm) *= cdouble(std::cos(phase), std::sin(phase));
        }
    }
    return m;
}

}  // namespace insector
