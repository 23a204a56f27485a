#pragma once

// Test-side reference implementations, kept independent of the library's
// FFT/assembly paths: direct O(N^4) transforms, literal-definition circular
// convolution, and exhaustive weight search at tiny sizes.

#include <complex>
#include <limits>
#include <vector>

#include "insector/codebook.hpp"
#include "insector/grid.hpp"
#include "insector/rng.hpp"
#include "insector/sector.hpp"

namespace oracle {

using insector::cdouble;
using insector::ComplexGrid;
using insector::kPi;

inline ComplexGrid random_grid(int rows, int cols, insector::Rng& rng) {
    ComplexGrid g(rows, cols);
    for (cdouble& v : g.data()) v = rng.complex_normal(1.0);
    return g;
}

// sign=-1: U_R A U_C by the definition, evaluated entry by entry.
inline ComplexGrid direct_fourier2(const ComplexGrid& a, int sign) {
    const int r = a.rows(), c = a.cols();
    ComplexGrid out(r, c);
    const double scale = 1.0 / std::sqrt(static_cast<double>(r) * c);
    for (int p = 0; p < r; ++p) {
        for (int q = 0; q < c; ++q) {
            cdouble s{};
            for (int i = 0; i < r; ++i) {
                for (int j = 0; j < c; ++j) {
                    const double ang =
                        sign * 2.0 * kPi *
                        (static_cast<double>(i) * p / r + static_cast<double>(j) * q / c);
                    s += a(i, j) * cdouble(std::cos(ang), std::sin(ang));
                }
            }
            out(p, q) = scale * s;
        }
    }
    return out;
}

inline ComplexGrid direct_dft2(const ComplexGrid& a) { return direct_fourier2(a, -1); }
inline ComplexGrid direct_idft2(const ComplexGrid& a) { return direct_fourier2(a, +1); }

// (a (*) b)(r,c) = sum_ij a(i,j) b(<r-i>, <c-j>)
inline ComplexGrid direct_circconv2(const ComplexGrid& a, const ComplexGrid& b) {
    const int n = a.rows();
    ComplexGrid out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            cdouble s{};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) s += a(i, j) * b.wrap(r - i, c - j);
            out(r, c) = s;
        }
    return out;
}

inline double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

// Smallest achievable uniformity ratio over every q-bit weight matrix.
// Feasible only when (2^q)^(rho_e*rho_a) is small.
inline double exhaustive_best_ratio(const insector::SectorSpec& s, int q) {
    const int cells = s.comb_size();
    const int levels = insector::phase_levels(q);
    const double wmag = insector::weight_magnitude(s);
    long long total = 1;
    for (int i = 0; i < cells; ++i) total *= levels;

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<std::size_t>(cells), 0);
    for (long long code = 0; code < total; ++code) {
        long long rest = code;
        ComplexGrid w(s.rho_e(), s.rho_a());
        for (int i = 0; i < cells; ++i) {
            idx[static_cast<std::size_t>(i)] = static_cast<int>(rest % levels);
            rest /= levels;
            w.data()[static_cast<std::size_t>(i)] =
                insector::qq_value(idx[static_cast<std::size_t>(i)], q, wmag);
        }
        best = std::min(best, insector::uniformity_ratio_flat(insector::t_submatrix(s, w)));
    }
    return best;
}

}  // namespace oracle
