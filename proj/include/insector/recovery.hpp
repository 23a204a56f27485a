#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "insector/csmodel.hpp"
#include "insector/grid.hpp"
#include "insector/sector.hpp"

namespace insector {

namespace detail {

// Solve the Hermitian positive-definite system G x = b by Cholesky. Returns
// false if a pivot falls below tol * max-diagonal.
inline bool cholesky_solve(std::vector<cdouble> g, int t, std::vector<cdouble>& b, double tol) {
    double max_diag = 0.0;
    for (int i = 0; i < t; ++i) max_diag = std::max(max_diag, g[i * t + i].real());
    for (int j = 0; j < t; ++j) {
        for (int k = 0; k < j; ++k) {
            const cdouble ljk = g[j * t + k];
            for (int i = j; i < t; ++i) g[i * t + j] -= g[i * t + k] * std::conj(ljk);
        }
        const double d = g[j * t + j].real();
        if (!(d > tol * std::max(max_diag, 1e-300))) return false;
        const double root = std::sqrt(d);
        g[j * t + j] = root;
        for (int i = j + 1; i < t; ++i) g[i * t + j] /= root;
    }
    for (int i = 0; i < t; ++i) {  // forward: L z = b
        for (int k = 0; k < i; ++k) b[i] -= g[i * t + k] * b[k];
        b[i] /= g[i * t + i].real();
    }
    for (int i = t - 1; i >= 0; --i) {  // backward: L^H x = z
        for (int k = i + 1; k < t; ++k) b[i] -= std::conj(g[k * t + i]) * b[k];
        b[i] /= g[i * t + i].real();
    }
    return true;
}

}  // namespace detail

struct OmpConfig {
    enum class StopRule { known_k, residual_threshold, max_iterations };
    StopRule stop = StopRule::known_k;
    int k = 1;                        // target sparsity for known_k
    double residual_threshold = 0.0;  // for residual_threshold
    int max_iterations = 0;           // hard cap; 0 means min(M, rho_e*rho_a)
    double ls_tol = 1e-12;
};

struct OmpResult {
    std::vector<cdouble> estimate;       // dense, zeros off the support
    std::vector<int> support;            // in selection order
    std::vector<double> residual_norms;  // ||r||_2, starting with ||y||_2
    bool regularized = false;            // refit needed ridge regularization
};

// Classical OMP with a least-squares refit on the selected support at every
// iteration. Columns are picked by maximum norm-normalized residual
// correlation; the non-uniform column norms of the in-sector CS matrix would
// otherwise bias selection toward bright mask entries.
inline OmpResult omp(const CsInstance& inst, const OmpConfig& cfg) {
    const int m = inst.measurement_count();
    const int kc = inst.column_count();
    if (m < 1) throw std::invalid_argument("omp: no measurements");

    int cap = (cfg.max_iterations > 0) ? cfg.max_iterations : std::min(m, kc);
    cap = std::min(cap, std::min(m, kc));
    if (cfg.stop == OmpConfig::StopRule::known_k) {
        if (cfg.k < 1) throw std::invalid_argument("omp: k must be >= 1");
        cap = std::min(cap, cfg.k);
    }

    const std::vector<double> norms = inst.column_norms();
    std::vector<cdouble> residual = inst.y;
    std::vector<bool> used(static_cast<std::size_t>(kc), false);

    OmpResult res;
    res.estimate.assign(static_cast<std::size_t>(kc), cdouble{});
    double rnorm = 0.0;
    for (const cdouble& v : residual) rnorm += std::norm(v);
    rnorm = std::sqrt(rnorm);
    res.residual_norms.push_back(rnorm);

    std::vector<cdouble> coeffs;
    while (static_cast<int>(res.support.size()) < cap) {
        if (cfg.stop == OmpConfig::StopRule::residual_threshold &&
            rnorm <= cfg.residual_threshold)
            break;

        int best = -1;
        double best_corr = 0.0;
        for (int i = 0; i < kc; ++i) {
            if (used[static_cast<std::size_t>(i)] || norms[static_cast<std::size_t>(i)] <= 0.0)
                continue;
            cdouble dot{};
            for (int r = 0; r < m; ++r) dot += std::conj(inst.a_eff(r, i)) * residual[static_cast<std::size_t>(r)];
            const double corr = std::abs(dot) / norms[static_cast<std::size_t>(i)];
            if (corr > best_corr) {
                best_corr = corr;
                best = i;
            }
        }
        if (best < 0 || best_corr <= 1e-300) break;  // residual orthogonal to dictionary
        used[static_cast<std::size_t>(best)] = true;
        res.support.push_back(best);

        // refit on the support: (A_S^H A_S) x = A_S^H y
        const int t = static_cast<int>(res.support.size());
        std::vector<cdouble> gram(static_cast<std::size_t>(t) * t);
        coeffs.assign(static_cast<std::size_t>(t), cdouble{});
        for (int a = 0; a < t; ++a) {
            for (int b = 0; b <= a; ++b) {
                cdouble dot{};
                for (int r = 0; r < m; ++r)
                    dot += std::conj(inst.a_eff(r, res.support[static_cast<std::size_t>(a)])) *
                           inst.a_eff(r, res.support[static_cast<std::size_t>(b)]);
                gram[static_cast<std::size_t>(a) * t + b] = dot;
                gram[static_cast<std::size_t>(b) * t + a] = std::conj(dot);
            }
            cdouble dot{};
            for (int r = 0; r < m; ++r)
                dot += std::conj(inst.a_eff(r, res.support[static_cast<std::size_t>(a)])) *
                       inst.y[static_cast<std::size_t>(r)];
            coeffs[static_cast<std::size_t>(a)] = dot;
        }
        std::vector<cdouble> rhs = coeffs;
        if (!detail::cholesky_solve(gram, t, rhs, cfg.ls_tol)) {
            // rank-deficient support: ridge fallback
            res.regularized = true;
            double trace = 0.0;
            for (int a = 0; a < t; ++a) trace += gram[static_cast<std::size_t>(a) * t + a].real();
            const double ridge = std::max(trace / t, 1e-300) * 1e-10;
            for (int a = 0; a < t; ++a) gram[static_cast<std::size_t>(a) * t + a] += ridge;
            rhs = coeffs;
            if (!detail::cholesky_solve(gram, t, rhs, 0.0))
                throw std::runtime_error("omp: regularized refit failed");
        }

        residual = inst.y;
        for (int a = 0; a < t; ++a)
            for (int r = 0; r < m; ++r)
                residual[static_cast<std::size_t>(r)] -=
                    inst.a_eff(r, res.support[static_cast<std::size_t>(a)]) * rhs[static_cast<std::size_t>(a)];
        rnorm = 0.0;
        for (const cdouble& v : residual) rnorm += std::norm(v);
        rnorm = std::sqrt(rnorm);
        res.residual_norms.push_back(rnorm);
        coeffs = rhs;
    }

    for (std::size_t a = 0; a < res.support.size(); ++a)
        res.estimate[static_cast<std::size_t>(res.support[a])] = coeffs[a];
    return res;
}

// Scatter the in-sector estimate back onto the N x N beamspace and return the
// antenna-domain channel estimate U_N X_hat U_N.
inline ComplexGrid in_sector_estimate(const std::vector<cdouble>& x_hat, const SectorSpec& s) {
    if (static_cast<int>(x_hat.size()) != s.comb_size())
        throw std::invalid_argument("in_sector_estimate: estimate length must be rho_e*rho_a");
    ComplexGrid xg(s.n, s.n);
    const auto comb = s.comb_indices();
    for (std::size_t i = 0; i < comb.size(); ++i) xg(comb[i].first, comb[i].second) = x_hat[i];
    return dft2(xg);
}

// Masked ground truth: keep the beamspace entries inside the sector, zero the
// rest, and return the antenna-domain channel.
inline ComplexGrid masked_channel(const ComplexGrid& h, const SectorSpec& s) {
    ComplexGrid x = beamspace(h);
    ComplexGrid xm(s.n, s.n);
    for (const auto& [p, q] : s.comb_indices()) xm(p, q) = x(p, q);
    return dft2(xm);
}

// --- support-recovery and MSE guarantees ------------------------------------

inline double support_recovery_probability_bound(double sigma, double gamma, int n, int sector_count) {
    const double base = 1.0 - std::sqrt(2.0 / kPi) * std::sqrt(sigma / gamma) *
                                  std::exp(-gamma * gamma / (2.0 * sigma * sigma));
    if (base <= 0.0) return 0.0;
    const double exponent = 2.0 * static_cast<double>(n) * n / sector_count;
    return std::pow(base, exponent);
}

inline double recovery_mse_bound(double d_min, double d_max, double mu, int k, double gamma,
                                 bool* degenerate = nullptr) {
    const double den = d_min - (k - 1) * mu * d_max;
    if (degenerate) *degenerate = !(den > 0.0);
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    const double ratio = d_max / d_min;
    return ratio * ratio * k * gamma * gamma / (den * den);
}

struct GuaranteeReport {
    double d_min = 0.0;
    double d_max = 0.0;
    double mu = 0.0;
    int k = 0;
    double gamma = 0.0;
    bool condition_holds = false;    // d_min*x_min - (2k-1)*mu*d_max*x_min >= 2*gamma
    double prob_lower_bound = 0.0;   // clamped to [0, 1]
    double mse_upper_bound = 0.0;    // +inf when the denominator degenerates
    bool denominator_degenerate = false;
};

inline GuaranteeReport guarantee_report(const CsInstance& inst, int k, double x_min, double gamma,
                                       double sigma, int sector_count) {
    if (k < 1) throw std::invalid_argument("guarantee_report: k must be >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("guarantee_report: gamma must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("guarantee_report: sigma must be > 0");

    GuaranteeReport rep;
    rep.k = k;
    rep.gamma = gamma;
    const std::vector<double> d = inst.column_norms();
    rep.d_min = *std::min_element(d.begin(), d.end());
    rep.d_max = *std::max_element(d.begin(), d.end());
    rep.mu = gram_coherence(inst.a_eff);
    rep.condition_holds =
        rep.d_min * x_min - (2 * k - 1) * rep.mu * rep.d_max * x_min >= 2.0 * gamma;
    rep.prob_lower_bound = support_recovery_probability_bound(sigma, gamma, inst.n, sector_count);
    rep.mse_upper_bound =
        recovery_mse_bound(rep.d_min, rep.d_max, rep.mu, k, gamma, &rep.denominator_degenerate);
    return rep;
}

}  // namespace insector
