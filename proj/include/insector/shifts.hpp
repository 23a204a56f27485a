#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "insector/grid.hpp"
#include "insector/rng.hpp"
#include "insector/sector.hpp"

namespace insector {

enum class ShiftKind { nyquist, pcs, rcs };

inline const char* shift_kind_name(ShiftKind k) {
    switch (k) {
        case ShiftKind::nyquist: return "nyquist";
        case ShiftKind::pcs: return "pcs";
        case ShiftKind::rcs: return "rcs";
    }
    return "?";
}

// Ordered set of distinct 2D circular shifts applied to the base AWM.
struct ShiftSet {
    int n = 0;
    ShiftKind kind = ShiftKind::nyquist;
    std::vector<std::pair<int, int>> shifts;

    int count() const { return static_cast<int>(shifts.size()); }

    // Binary indicator grid with exactly count() ones.
    ComplexGrid indicator() const {
        ComplexGrid g(n, n);
        for (const auto& [r, c] : shifts) {
            if (r < 0 || r >= n || c < 0 || c >= n)
                throw std::out_of_range("ShiftSet: shift outside [N] x [N]");
            g(r, c) = 1.0;
        }
        return g;
    }
};

// The full [rho_e] x [rho_a] block; the measurement count equals the sector
// dimension and the in-sector coherence is exactly zero.
inline ShiftSet nyquist_shifts(const SectorSpec& s) {
    ShiftSet out{s.n, ShiftKind::nyquist, {}};
    out.shifts.reserve(static_cast<std::size_t>(s.comb_size()));
    for (int r = 0; r < s.rho_e(); ++r)
        for (int c = 0; c < s.rho_a(); ++c) out.shifts.emplace_back(r, c);
    return out;
}

// m shifts drawn uniformly without replacement from the Nyquist block.
inline ShiftSet pcs_shifts(const SectorSpec& s, int m, Rng& rng) {
    const int total = s.comb_size();
    if (m < 1 || m > total) throw std::invalid_argument("pcs_shifts: m out of range");
    ShiftSet out{s.n, ShiftKind::pcs, {}};
    out.shifts.reserve(static_cast<std::size_t>(m));
    for (int flat : rng.sample_without_replacement(total, m))
        out.shifts.emplace_back(flat / s.rho_a(), flat % s.rho_a());
    return out;
}

// m shifts drawn uniformly without replacement from the whole [N] x [N] grid.
inline ShiftSet rcs_shifts(int n, int m, Rng& rng) {
    if (m < 1 || m > n * n) throw std::invalid_argument("rcs_shifts: m out of range");
    ShiftSet out{n, ShiftKind::rcs, {}};
    out.shifts.reserve(static_cast<std::size_t>(m));
    for (int flat : rng.sample_without_replacement(n * n, m)) out.shifts.emplace_back(flat / n, flat % n);
    return out;
}

// PSF = (N/M) U_N^* N_Omega U_N^*.
inline ComplexGrid psf(const ShiftSet& set) {
    if (set.shifts.empty()) throw std::invalid_argument("psf: empty shift set");
    ComplexGrid g = idft2(set.indicator());
    g *= static_cast<double>(set.n) / static_cast<double>(set.count());
    return g;
}

// Comb lattice T on which PSF sidelobes alias into the sector; excludes the
// origin. Empty in the degenerate single-measurement-per-beamspace case
// (N_e = N_a = N).
inline std::vector<std::pair<int, int>> alias_lattice(const SectorSpec& s) {
    std::vector<std::pair<int, int>> out;
    for (int bn = 0; bn < s.rho_e(); ++bn)
        for (int bm = 0; bm < s.rho_a(); ++bm) {
            if (bn == 0 && bm == 0) continue;
            out.emplace_back(bn * s.n_e, bm * s.n_a);
        }
    return out;
}

// In-sector coherence mu_0: the largest PSF sidelobe on the alias lattice.
// Equals the mutual coherence of the effective CS matrix.
inline double in_sector_coherence(const ShiftSet& set, const SectorSpec& s) {
    if (set.n != s.n) throw std::invalid_argument("in_sector_coherence: size mismatch");
    const auto lattice = alias_lattice(s);
    if (lattice.empty()) return 0.0;
    const ComplexGrid f = psf(set);
    double mu = 0.0;
    for (const auto& [i, j] : lattice) mu = std::max(mu, std::abs(f(i, j)));
    return mu;
}

}  // namespace insector
