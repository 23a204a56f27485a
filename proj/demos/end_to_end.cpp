// Minimal end-to-end walkthrough: design a comb-sector codebook, sweep a
// random channel, acquire in-sector CCS measurements, recover the beamspace
// with OMP, and evaluate the resulting beamformer.

#include <cstdio>

#include "insector/insector.hpp"

using namespace insector;

int main() {
    const int n = 16, n_e = 2, n_a = 2, q = 1;

    const Codebook book = build_codebook(n, n_e, n_a, q);
    for (const Awm& awm : book.awms)
        std::printf("sector (%d,%d): uniformity ratio %.3f\n", awm.sector.k_e, awm.sector.k_a,
                    make_spectral_mask(awm).uniformity);

    Rng rng_ch(42);
    const ChannelRealization ch =
        random_channel({1, 3, ChannelMode::off_grid}, n, /*l_taps=*/4, rng_ch);
    const double sigma = noise_sigma_for_snr(ch.sum().squared_norm(), n, /*snr_db=*/0.0);

    Rng rng_sls(1);
    const SlsResult sls = sls_measure(ch, codebook_grids(book), sigma, rng_sls);
    std::printf("sector of interest: %d\n", sls.best_sector);
    const Awm& awm = book.awms[static_cast<std::size_t>(sls.best_sector)];

    Rng rng_shift(2);
    const ShiftSet shifts = pcs_shifts(awm.sector, /*m=*/40, rng_shift);
    Rng rng_noise(3);
    const CsInstance inst = assemble_cs(ch, awm, shifts, sigma, rng_noise, /*n_seq=*/256);
    std::printf("coherence mu0 = %.4f with %d measurements of %d unknowns\n",
                in_sector_coherence(shifts, awm.sector), inst.measurement_count(),
                inst.column_count());

    OmpConfig omp_cfg;
    omp_cfg.stop = OmpConfig::StopRule::residual_threshold;
    omp_cfg.residual_threshold = 1.1 * inst.sigma * std::sqrt(static_cast<double>(inst.measurement_count()));
    const OmpResult rec = omp(inst, omp_cfg);

    const ComplexGrid h_hat = in_sector_estimate(rec.estimate, awm.sector);
    const ComplexGrid h_true = masked_channel(ch.sum(), awm.sector);
    std::printf("in-sector NMSE: %.4g with %zu atoms\n", nmse(h_true, h_hat),
                rec.support.size());

    const Beamformer bf = beamformer_from_estimate(h_hat, q);
    const double rate = waterfilling_rate(effective_channel(ch, bf.grid), sigma, 64, 1.0);
    std::printf("achievable rate: %.4f bits/s/Hz\n", rate);
    return 0;
}
