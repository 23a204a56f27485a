#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "insector/grid.hpp"
#include "insector/rng.hpp"
#include "insector/sector.hpp"

namespace insector {

inline double uniformity_ratio_flat(const ComplexGrid& t_sub) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const cdouble& v : t_sub.data()) {
        const double a = std::abs(v);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (lo <= 1e-300) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

// Uniform random draw from the q-bit weight alphabet.
inline ComplexGrid random_weights(const SectorSpec& s, int q, Rng& rng) {
    const double wmag = weight_magnitude(s);
    ComplexGrid w(s.rho_e(), s.rho_a());
    for (cdouble& v : w.data()) v = qq_value(rng.uniform_int(phase_levels(q)), q, wmag);
    return w;
}

// Zadoff-Chu phase ramp of length n.
inline double zadoff_chu_phase(int i, int n) {
    if (n % 2 == 0) return -kPi * static_cast<double>(i) * i / n;
    return -kPi * static_cast<double>(i) * (i + 1) / n;
}

// Frank sequence phase for index i of a length k^2 sequence.
inline double frank_phase(int i, int k) {
    return 2.0 * kPi * static_cast<double>(i / k) * (i % k) / k;
}

inline int exact_sqrt(int n) {
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    return r * r == n ? r : 0;
}

// Structured starting points with good autocorrelation (quantized DFT,
// Zadoff-Chu and Frank outer products), each also in a variant that
// pre-compensates the anchor modulation, plus random draws. Everything is
// projected onto the q-bit alphabet up front.
inline std::vector<ComplexGrid> default_weight_inits(const SectorSpec& s, int q, Rng& rng,
                                                     int n_random = 3) {
    const double wmag = weight_magnitude(s);
    const int re = s.rho_e(), ra = s.rho_a();
    std::vector<ComplexGrid> inits;

    auto push_with_compensation = [&](auto&& phase_fn) {
        for (int comp = 0; comp < 2; ++comp) {
            ComplexGrid g(re, ra);
            for (int l = 0; l < re; ++l)
                for (int m = 0; m < ra; ++m) {
                    double phase = phase_fn(l, m);
                    if (comp)
                        phase -= 2.0 * kPi *
                                 (static_cast<double>(l) * s.k_e + static_cast<double>(m) * s.k_a) /
                                 s.n;
                    g(l, m) = cdouble(std::cos(phase), std::sin(phase));
                }
            inits.push_back(project_to_qq(g, q, wmag));
            if (s.k_e == 0 && s.k_a == 0) break;  // compensation is a no-op
        }
    };

    const int dft_len = std::max(re, ra);
    push_with_compensation([dft_len](int l, int m) {
        return -2.0 * kPi * (static_cast<double>(l) * m) / dft_len;
    });
    push_with_compensation(
        [re, ra](int l, int m) { return zadoff_chu_phase(l, re) + zadoff_chu_phase(m, ra); });
    const int ke_root = exact_sqrt(re), ka_root = exact_sqrt(ra);
    if (ke_root > 0 && ka_root > 0)
        push_with_compensation([ke_root, ka_root](int l, int m) {
            return frank_phase(l, ke_root) + frank_phase(m, ka_root);
        });

    for (int r = 0; r < n_random; ++r) inits.push_back(random_weights(s, q, rng));
    return inits;
}

struct WeightOptConfig {
    int max_iters = 500;       // alternation iterations per init
    double tol = 1e-8;         // objective-change stop for the alternation
    int n_random_inits = 3;
    int cd_max_sweeps = 100;   // polish sweeps; each sweep is monotone
};

struct WeightOptResult {
    ComplexGrid weights;
    double ratio = std::numeric_limits<double>::infinity();
    int init_index = -1;
};

namespace detail {

inline double flatness_objective(const ComplexGrid& t, double target_mag) {
    double s = 0.0;
    for (const cdouble& v : t.data()) {
        const double d = std::abs(v) - target_mag;
        s += d * d;
    }
    return s;
}

// Alternating projections on the comb profile: V-step projects the profile
// onto unit modulus, W-step inverts the (norm-preserving) profile map and
// reprojects onto unit-modulus weights. The state stays continuous so the
// iteration cannot lock onto a quantization fixed point; each iterate is
// quantized and the best quantized candidate is kept.
inline ComplexGrid alternate_flatten(const SectorSpec& s, int q, const ComplexGrid& init,
                                     const WeightOptConfig& cfg) {
    const double wmag = weight_magnitude(s);
    const double target_mag = 1.0 / std::sqrt(static_cast<double>(s.comb_size()));
    ComplexGrid w = init;
    ComplexGrid best = project_to_qq(init, q, wmag);
    double best_ratio = uniformity_ratio_flat(t_submatrix(s, best));
    double prev_obj = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iters; ++it) {
        const ComplexGrid t = t_submatrix(s, w);
        ComplexGrid target(t.rows(), t.cols());
        double obj = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const cdouble v = t.data()[k];
            const double a = std::abs(v);
            target.data()[k] = (a > 1e-300) ? target_mag * (v / a) : cdouble(target_mag, 0.0);
            obj += std::norm(v - target.data()[k]);
        }
        obj = std::sqrt(obj);

        w = weights_from_t_submatrix(s, target);
        for (cdouble& v : w.data()) {
            const double a = std::abs(v);
            v = (a > 1e-300) ? wmag * (v / a) : cdouble(wmag, 0.0);
        }

        const ComplexGrid wq = project_to_qq(w, q, wmag);
        const double ratio = uniformity_ratio_flat(t_submatrix(s, wq));
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best = wq;
        }
        if (std::abs(prev_obj - obj) < cfg.tol) break;
        prev_obj = obj;
    }
    return best;
}

// Cyclic coordinate descent over the q-bit alphabet. ratio_mode=false
// minimizes the flatness objective; ratio_mode=true minimizes the uniformity
// ratio with the objective as tie-break.
inline ComplexGrid coordinate_descent(const SectorSpec& s, int q, ComplexGrid w,
                                      const WeightOptConfig& cfg, bool ratio_mode) {
    const double wmag = weight_magnitude(s);
    const double target_mag = 1.0 / std::sqrt(static_cast<double>(s.comb_size()));
    const int levels = phase_levels(q);
    auto score = [&](const ComplexGrid& cand) {
        const ComplexGrid t = t_submatrix(s, cand);
        return std::pair<double, double>(ratio_mode ? uniformity_ratio_flat(t) : 0.0,
                                         flatness_objective(t, target_mag));
    };
    auto better = [](const std::pair<double, double>& a, const std::pair<double, double>& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second - 1e-15;
    };
    std::pair<double, double> cur = score(w);
    for (int sweep = 0; sweep < cfg.cd_max_sweeps; ++sweep) {
        bool improved = false;
        for (int l = 0; l < w.rows(); ++l) {
            for (int m = 0; m < w.cols(); ++m) {
                const cdouble orig = w(l, m);
                cdouble best_v = orig;
                std::pair<double, double> best_s = cur;
                for (int lev = 0; lev < levels; ++lev) {
                    const cdouble cand = qq_value(lev, q, wmag);
                    if (std::abs(cand - orig) < 1e-15) continue;
                    w(l, m) = cand;
                    const auto sc = score(w);
                    if (better(sc, best_s)) {
                        best_s = sc;
                        best_v = cand;
                    }
                }
                w(l, m) = best_v;
                if (better(best_s, cur)) {
                    cur = best_s;
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    return w;
}

}  // namespace detail

// Flatness optimization of the in-sector illumination: for each init, run the
// alternating projections and then polish with coordinate descent, first on
// the flatness objective and then on the ratio itself. The lowest uniformity
// ratio across initializations wins; ties go to the lowest init index.
inline WeightOptResult optimize_weights(const SectorSpec& s, int q,
                                        const std::vector<ComplexGrid>& inits,
                                        const WeightOptConfig& cfg = {}) {
    if (inits.empty()) throw std::invalid_argument("optimize_weights: no initializations");
    WeightOptResult best;
    for (std::size_t idx = 0; idx < inits.size(); ++idx) {
        if (inits[idx].rows() != s.rho_e() || inits[idx].cols() != s.rho_a())
            throw std::invalid_argument("optimize_weights: init has wrong shape");
        ComplexGrid w = detail::alternate_flatten(s, q, inits[idx], cfg);
        w = detail::coordinate_descent(s, q, w, cfg, /*ratio_mode=*/false);
        w = detail::coordinate_descent(s, q, w, cfg, /*ratio_mode=*/true);
        const double ratio = uniformity_ratio_flat(t_submatrix(s, w));
        if (ratio < best.ratio) {
            best.weights = w;
            best.ratio = ratio;
            best.init_index = static_cast<int>(idx);
        }
    }
    return best;
}

struct Codebook {
    int n = 0;
    int n_e = 0;
    int n_a = 0;
    int q = 1;
    std::vector<Awm> awms;  // ordered by sector index s = N_a*k_e + k_a
};

inline int min_bits_for(int n_e, int n_a) { return log2_exact(std::max(n_e, n_a)); }

enum class WeightMode { optimized, random };

// Builds the S = N_e*N_a base AWMs, one per anchor, each sector optimized
// independently. Weight optimization is seeded per sector so the result does
// not depend on build order.
inline Codebook build_codebook(int n, int n_e, int n_a, int q,
                               WeightMode mode = WeightMode::optimized,
                               const WeightOptConfig& cfg = {}, std::uint64_t seed = 0) {
    const int q_min = min_bits_for(n_e, n_a);
    if (q < q_min)
        throw std::invalid_argument("build_codebook: q must be at least " +
                                    std::to_string(q_min) + " for N_e=" + std::to_string(n_e) +
                                    ", N_a=" + std::to_string(n_a));
    Codebook book{n, n_e, n_a, q, {}};
    for (const SectorSpec& s : all_sectors(n, n_e, n_a)) {
        Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(s.sector_index()),
                                  RngStream::weight_init);
        ComplexGrid w;
        if (mode == WeightMode::optimized) {
            w = optimize_weights(s, q, default_weight_inits(s, q, rng, cfg.n_random_inits), cfg)
                    .weights;
        } else {
            w = random_weights(s, q, rng);
        }
        book.awms.push_back(assemble_awm(s, w, q));
    }
    return book;
}

}  // namespace insector
