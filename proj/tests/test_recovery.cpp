#include <catch2/catch.hpp>

#include <algorithm>

#include "insector/codebook.hpp"
#include "insector/recovery.hpp"
#include "oracles.hpp"

using namespace insector;

namespace {

Awm optimized_awm(const SectorSpec& s, int q, std::uint64_t seed) {
    Rng rng(seed);
    return assemble_awm(s, optimize_weights(s, q, default_weight_inits(s, q, rng, 2)).weights, q);
}

struct SparseCase {
    ChannelRealization ch;
    std::vector<int> support;      // sorted
    std::vector<cdouble> x_truth;  // full comb vector
};

SparseCase in_sector_sparse(const SectorSpec& s, int k, Rng& rng, double min_mag = 0.5,
                            double max_mag = 1.5) {
    SparseCase out;
    const auto comb = s.comb_indices();
    std::vector<Ray> rays;
    for (int flat : rng.sample_without_replacement(static_cast<int>(comb.size()), k)) {
        out.support.push_back(flat);
        const double mag = rng.uniform(min_mag, max_mag);
        const double ph = rng.uniform(0.0, 2.0 * kPi);
        rays.push_back(ray_at_grid(comb[static_cast<std::size_t>(flat)].first,
                                   comb[static_cast<std::size_t>(flat)].second,
                                   mag * cdouble(std::cos(ph), std::sin(ph)), s.n));
    }
    std::sort(out.support.begin(), out.support.end());
    out.ch = synth_channel(rays, s.n, 1, ChannelMode::on_grid);
    out.x_truth = comb_values(beamspace(out.ch.sum()), s);
    return out;
}

}  // namespace

TEST_CASE("noiseless single-atom recovery is exact under Nyquist shifts") {
    const SectorSpec s(8, 2, 2, 1, 0);
    const Awm awm = optimized_awm(s, 1, 51);
    Rng rng(52);
    const SparseCase sc = in_sector_sparse(s, 1, rng);
    Rng rng_n(53);
    const CsInstance inst = assemble_cs(sc.ch, awm, nyquist_shifts(s), 0.0, rng_n);

    OmpConfig cfg;
    cfg.k = 1;
    const OmpResult r = omp(inst, cfg);
    REQUIRE(r.support.size() == 1);
    CHECK(r.support[0] == sc.support[0]);
    for (std::size_t i = 0; i < sc.x_truth.size(); ++i)
        CHECK(std::abs(r.estimate[i] - sc.x_truth[i]) <=
              1e-8 * std::max(1.0, std::abs(sc.x_truth[i])));
}

TEST_CASE("noiseless three-atom recovery is exact under Nyquist shifts") {
    const SectorSpec s(16, 4, 4, 2, 1);
    const Awm awm = optimized_awm(s, 2, 54);
    Rng rng(55);
    const SparseCase sc = in_sector_sparse(s, 3, rng);
    Rng rng_n(56);
    const CsInstance inst = assemble_cs(sc.ch, awm, nyquist_shifts(s), 0.0, rng_n);

    OmpConfig cfg;
    cfg.k = 3;
    const OmpResult r = omp(inst, cfg);
    std::vector<int> sup = r.support;
    std::sort(sup.begin(), sup.end());
    CHECK(sup == sc.support);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < sc.x_truth.size(); ++i) {
        err += std::norm(r.estimate[i] - sc.x_truth[i]);
        ref += std::norm(sc.x_truth[i]);
    }
    CHECK(std::sqrt(err / ref) < 1e-8);
}

TEST_CASE("noiseless Nyquist recovery is exact for every sparsity up to the comb size") {
    const SectorSpec s(8, 4, 4, 3, 2);  // comb of 4 cells
    const Awm awm = optimized_awm(s, 2, 57);
    for (int k = 1; k <= s.comb_size(); ++k) {
        Rng rng(60 + static_cast<std::uint64_t>(k));
        const SparseCase sc = in_sector_sparse(s, k, rng);
        Rng rng_n(70 + static_cast<std::uint64_t>(k));
        const CsInstance inst = assemble_cs(sc.ch, awm, nyquist_shifts(s), 0.0, rng_n);
        OmpConfig cfg;
        cfg.k = k;
        const OmpResult r = omp(inst, cfg);
        std::vector<int> sup = r.support;
        std::sort(sup.begin(), sup.end());
        CHECK(sup == sc.support);
    }
}

TEST_CASE("residual norms never increase") {
    const SectorSpec s(16, 4, 4, 0, 3);
    const Awm awm = optimized_awm(s, 2, 58);
    Rng rng(59);
    const SparseCase sc = in_sector_sparse(s, 4, rng);
    Rng rng_sh(60);
    const ShiftSet shifts = pcs_shifts(s, 12, rng_sh);
    Rng rng_n(61);
    const CsInstance inst = assemble_cs(sc.ch, awm, shifts, 0.05 * s.n, rng_n);

    OmpConfig cfg;
    cfg.stop = OmpConfig::StopRule::max_iterations;
    cfg.max_iterations = 12;
    const OmpResult r = omp(inst, cfg);
    REQUIRE(r.residual_norms.size() >= 2);
    for (std::size_t t = 1; t < r.residual_norms.size(); ++t)
        CHECK(r.residual_norms[t] <= r.residual_norms[t - 1] + 1e-12);
}

TEST_CASE("residual-threshold stopping halts once the fit is within noise") {
    const SectorSpec s(8, 2, 2, 0, 0);
    const Awm awm = optimized_awm(s, 1, 62);
    Rng rng(63);
    const SparseCase sc = in_sector_sparse(s, 2, rng);
    Rng rng_n(64);
    const CsInstance inst = assemble_cs(sc.ch, awm, nyquist_shifts(s), 0.0, rng_n);
    OmpConfig cfg;
    cfg.stop = OmpConfig::StopRule::residual_threshold;
    cfg.residual_threshold = 1e-9;
    const OmpResult r = omp(inst, cfg);
    CHECK(r.support.size() == 2);  // stops right after the true atoms
    CHECK(r.residual_norms.back() <= 1e-9);
}

TEST_CASE("the iteration cap never exceeds min(M, comb size)") {
    const SectorSpec s(8, 2, 2, 1, 1);
    const Awm awm = optimized_awm(s, 1, 91);
    Rng rng(92);
    const SparseCase sc = in_sector_sparse(s, 2, rng);
    Rng rng_sh(93);
    const ShiftSet shifts = pcs_shifts(s, 6, rng_sh);
    Rng rng_n(94);
    const CsInstance inst = assemble_cs(sc.ch, awm, shifts, 0.01 * s.n, rng_n);
    OmpConfig cfg;
    cfg.stop = OmpConfig::StopRule::max_iterations;
    cfg.max_iterations = 999;  // clamped to min(M, rho_e*rho_a) = 6
    const OmpResult r = omp(inst, cfg);
    CHECK(static_cast<int>(r.support.size()) <= 6);
}

TEST_CASE("rank-deficient support triggers the regularized refit flag") {
    CsInstance inst;
    inst.n = 4;
    inst.sector = SectorSpec(4, 2, 2, 0, 0);
    inst.comb = inst.sector.comb_indices();
    inst.a_eff = ComplexGrid(3, 3);
    // two orthonormal columns and their exact average direction
    inst.a_eff(0, 0) = 1.0;
    inst.a_eff(1, 1) = 1.0;
    inst.a_eff(0, 2) = 1.0 / std::sqrt(2.0);
    inst.a_eff(1, 2) = 1.0 / std::sqrt(2.0);
    inst.z_sub = {cdouble(4.0 / std::sqrt(3.0), 0), cdouble(4.0 / std::sqrt(3.0), 0),
                  cdouble(4.0 / std::sqrt(3.0), 0)};
    inst.l_indices = {0, 1, 2};
    inst.y = {cdouble(1, 0), cdouble(1, 0), cdouble(1e-8, 0)};
    inst.sigma = 0.0;

    OmpConfig cfg;
    cfg.stop = OmpConfig::StopRule::max_iterations;
    cfg.max_iterations = 3;
    const OmpResult r = omp(inst, cfg);
    CHECK(r.support.size() == 3);
    CHECK(r.regularized);
}

TEST_CASE("in-sector estimate reconstructs the masked channel") {
    const SectorSpec s(16, 4, 4, 1, 1);
    // zero estimate -> zero channel
    const ComplexGrid zero =
        in_sector_estimate(std::vector<cdouble>(static_cast<std::size_t>(s.comb_size())), s);
    CHECK(zero.frobenius_norm() == 0.0);

    Rng rng(65);
    const SparseCase sc = in_sector_sparse(s, 3, rng);
    const ComplexGrid truth = masked_channel(sc.ch.sum(), s);
    const ComplexGrid rebuilt = in_sector_estimate(sc.x_truth, s);
    CHECK((truth - rebuilt).frobenius_norm() < 1e-12 * truth.frobenius_norm());
}

TEST_CASE("noiseless pipeline reproduces the masked channel to 1e-8") {
    const SectorSpec s(16, 4, 4, 3, 0);
    const Awm awm = optimized_awm(s, 2, 66);
    Rng rng(67);
    const SparseCase sc = in_sector_sparse(s, 3, rng);
    Rng rng_n(68);
    const CsInstance inst = assemble_cs(sc.ch, awm, nyquist_shifts(s), 0.0, rng_n);
    OmpConfig cfg;
    cfg.k = 3;
    const OmpResult r = omp(inst, cfg);
    const ComplexGrid h_hat = in_sector_estimate(r.estimate, s);
    const ComplexGrid h_true = masked_channel(sc.ch.sum(), s);
    CHECK((h_true - h_hat).frobenius_norm() < 1e-8 * h_true.frobenius_norm());
}

TEST_CASE("guarantee algebra specializes correctly at mu=0, k=1") {
    const SectorSpec s(16, 4, 4, 1, 2);
    const Awm awm = optimized_awm(s, 2, 101);  // perfectly flat profile for this sector
    Rng rng(69);
    const SparseCase sc = in_sector_sparse(s, 1, rng, 1.0, 1.0);
    Rng rng_n(70);
    const double sigma_inst = 1e-3;
    const CsInstance inst =
        assemble_cs(sc.ch, awm, nyquist_shifts(s), sigma_inst * s.n, rng_n);
    const double gamma = 5.0 * sigma_inst;
    const double x_min = 16.0;  // |x| = N for unit gains

    const GuaranteeReport rep = guarantee_report(inst, 1, x_min, gamma, sigma_inst, 16);
    CHECK(rep.mu < 1e-10);
    // column-norm bound from the mask energy constraint
    CHECK(rep.d_min > 0.0);
    CHECK(rep.d_min <= rep.d_max);
    CHECK(rep.d_max < std::sqrt(static_cast<double>(inst.measurement_count())) / inst.n);
    CHECK(rep.mse_upper_bound == Approx(gamma * gamma / (rep.d_min * rep.d_min)).epsilon(1e-9));
    // condition reduces to x_min >= 2*gamma/d_min
    CHECK(rep.condition_holds == (x_min >= 2.0 * gamma / rep.d_min));
    CHECK(rep.prob_lower_bound > 0.99);
    CHECK(rep.prob_lower_bound <= 1.0);
}

TEST_CASE("the MSE bound is minimized at equal column norms") {
    const int k = 2;
    const double gamma = 0.1, mu = 0.05;
    const double energy = 2.0;  // d_min^2 + d_max^2 fixed
    double prev = -1.0;
    for (double p : {0.0, 0.1, 0.2, 0.4, 0.6, 0.8}) {
        const double d_min = std::sqrt((1.0 - p) * energy / 2.0);
        const double d_max = std::sqrt((1.0 + p) * energy / 2.0);
        const double bound = recovery_mse_bound(d_min, d_max, mu, k, gamma);
        if (prev >= 0.0) CHECK(bound >= prev);
        prev = bound;
    }
}

TEST_CASE("degenerate denominator reports an infinite bound with a flag") {
    bool degenerate = false;
    const double b = recovery_mse_bound(0.1, 1.0, 0.5, 3, 0.1, &degenerate);
    CHECK(std::isinf(b));
    CHECK(degenerate);
}

TEST_CASE("conditional recovery rate and MSE respect the Theorem bounds") {
    const SectorSpec s(16, 4, 4, 1, 2);
    const Awm awm = optimized_awm(s, 2, 101);
    const double sigma_inst = 0.004, gamma = 5.0 * sigma_inst;
    int conforming = 0, success = 0, mse_within = 0;
    double min_prob_bound = 2.0;
    for (int t = 0; t < 200; ++t) {
        Rng rng_ch = Rng::for_stream(7, static_cast<std::uint64_t>(t), RngStream::channel);
        const SparseCase sc = in_sector_sparse(s, 2, rng_ch, 1.0, 1.0);
        Rng rng_sh = Rng::for_stream(7, static_cast<std::uint64_t>(t), RngStream::shift_draw);
        const ShiftSet shifts = pcs_shifts(s, 12, rng_sh);
        Rng rng_n = Rng::for_stream(7, static_cast<std::uint64_t>(t), RngStream::cs_noise);
        const CsInstance inst = assemble_cs(sc.ch, awm, shifts, sigma_inst * s.n, rng_n);

        const GuaranteeReport rep = guarantee_report(inst, 2, 16.0, gamma, inst.sigma, 16);
        if (!rep.condition_holds) continue;
        ++conforming;
        min_prob_bound = std::min(min_prob_bound, rep.prob_lower_bound);

        OmpConfig cfg;
        cfg.k = 2;
        const OmpResult r = omp(inst, cfg);
        std::vector<int> sup = r.support;
        std::sort(sup.begin(), sup.end());
        if (sup == sc.support) {
            ++success;
            double err = 0.0;
            for (std::size_t i = 0; i < sc.x_truth.size(); ++i)
                err += std::norm(r.estimate[i] - sc.x_truth[i]);
            if (err <= rep.mse_upper_bound) ++mse_within;
        }
    }
    REQUIRE(conforming > 100);
    CHECK(static_cast<double>(success) / conforming >= min_prob_bound);
    CHECK(mse_within == success);
}

TEST_CASE("guarantee report validates its inputs") {
    CsInstance inst;
    inst.n = 4;
    inst.z_sub = {cdouble(1, 0)};
    inst.a_eff = ComplexGrid(1, 1, cdouble(1, 0));
    inst.y = {cdouble(1, 0)};
    CHECK_THROWS_AS(guarantee_report(inst, 0, 1.0, 0.1, 0.1, 4), std::invalid_argument);
    CHECK_THROWS_AS(guarantee_report(inst, 1, 1.0, -0.1, 0.1, 4), std::invalid_argument);
    CHECK_THROWS_AS(guarantee_report(inst, 1, 1.0, 0.1, 0.0, 4), std::invalid_argument);
}
