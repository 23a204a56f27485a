#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "insector/beamform.hpp"
#include "insector/channel.hpp"
#include "insector/codebook.hpp"
#include "insector/csmodel.hpp"
#include "insector/io.hpp"
#include "insector/recovery.hpp"
#include "insector/shifts.hpp"
#include "insector/sweep.hpp"

namespace insector {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int n = 32;
    int n_e = 2;
    int n_a = 2;
    int q = 1;
    int l_taps = 10;
    std::vector<int> m_list = {80};
    std::vector<double> snr_omni_db_list = {-10.0};
    ShiftKind shift_kind = ShiftKind::pcs;
    WeightMode weight_mode = WeightMode::optimized;
    int trials = 100;
    std::uint64_t base_seed = 1;
    std::string output_path = "results.csv";

    // synthetic channel generator
    int k_min = 1;
    int k_max = 4;
    bool on_grid = false;

    // wideband measurement + rate evaluation
    int n_seq = 256;
    int n_fft = 64;
    double total_power = 1.0;

    // OMP stopping (pipeline rule: residual threshold = factor*sigma*sqrt(M)).
    // ||v||_2 concentrates at sigma*sqrt(M) for complex noise, so the factor
    // sits just above 1 to stop at the noise floor without fitting it.
    int omp_cap = 0;  // 0 -> min(M, rho_e*rho_a)
    double omp_residual_factor = 1.1;

    WeightOptConfig opt;

    int rho_e() const { return n / n_e; }
    int rho_a() const { return n / n_a; }
    int comb_size() const { return rho_e() * rho_a(); }
};

inline void validate_config(const ExperimentConfig& c) {
    std::string bad;
    auto flag = [&bad](bool ok, const char* field) {
        if (!ok) {
            if (!bad.empty()) bad += ", ";
            bad += field;
        }
    };
    flag(c.n >= 2 && c.n_e >= 1 && c.n_a >= 1 && c.n % std::max(c.n_e, 1) == 0 &&
             c.n % std::max(c.n_a, 1) == 0 && is_pow2(std::max(c.n_e, 1) * std::max(c.n_a, 1)),
         "n/n_e/n_a");
    flag(c.q >= 1 && (c.n_e < 1 || c.q >= min_bits_for(c.n_e, c.n_a)), "q");
    flag(c.l_taps >= 1, "l_taps");
    flag(c.trials >= 1, "trials");
    flag(!c.m_list.empty(), "m_list");
    if (c.n_e >= 1 && c.n_a >= 1 && c.n % c.n_e == 0 && c.n % c.n_a == 0) {
        for (int m : c.m_list) {
            const bool ok = (c.shift_kind == ShiftKind::rcs) ? (m >= 1 && m <= c.n * c.n)
                            : (c.shift_kind == ShiftKind::pcs)
                                ? (m >= 1 && m <= c.comb_size())
                                : (m == c.comb_size());
            flag(ok, "m_list");
            if (!ok) break;
        }
    }
    flag(!c.snr_omni_db_list.empty(), "snr_omni_db_list");
    for (double s : c.snr_omni_db_list)
        if (!std::isfinite(s)) {
            flag(false, "snr_omni_db_list");
            break;
        }
    flag(c.k_min >= 1 && c.k_max >= c.k_min, "k_min/k_max");
    flag(c.n_seq >= 1, "n_seq");
    flag(c.n_fft >= c.l_taps, "n_fft");
    flag(c.total_power > 0.0, "total_power");
    flag(c.omp_residual_factor >= 0.0, "omp_residual_factor");
    flag(!c.output_path.empty(), "output_path");
    if (!bad.empty()) throw ConfigError("invalid config fields: " + bad);
}

struct TrialMetrics {
    std::uint64_t seed = 0;
    int best_sector = 0;
    bool sls_correct = false;
    double nmse_num = 0.0;
    double nmse_den = 0.0;
    double rate = 0.0;
    double mu0 = 0.0;
    bool zero_truth = false;  // chosen sector held no channel energy
};

struct ResultRow {
    int m = 0;
    double snr_omni_db = 0.0;
    int trials = 0;
    double mean_nmse = 0.0;  // batch-averaged numerator over denominator
    double mean_rate = 0.0;
    double rate_p10 = 0.0;
    double rate_p50 = 0.0;
    double rate_p90 = 0.0;
    double sls_accuracy = 0.0;
    double mean_mu0 = 0.0;
    int skipped_zero_truth = 0;
};

namespace detail {

inline double nearest_rank_quantile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const int n = static_cast<int>(v.size());
    int idx = static_cast<int>(std::ceil(p * n)) - 1;
    idx = std::max(0, std::min(n - 1, idx));
    return v[static_cast<std::size_t>(idx)];
}

}  // namespace detail

// sigma^2 = E[||H_sum||_F^2] / (N^2 * SNR_omni), the closed-form counterpart
// of calibrating against a quasi-omni beam whose expected measurement power
// is ||H||_F^2 / N^2.
inline double noise_sigma_for_snr(double mean_sum_energy, int n, double snr_omni_db) {
    const double snr_lin = std::pow(10.0, snr_omni_db / 10.0);
    return std::sqrt(mean_sum_energy / (static_cast<double>(n) * n * snr_lin));
}

// One full SLS -> shifts -> CCS -> OMP -> beamforming pass.
inline TrialMetrics run_trial(const ExperimentConfig& cfg, const Codebook& book,
                              const std::vector<ComplexGrid>& grids,
                              const ChannelRealization& ch, int noiseless_best, double sigma,
                              int m, std::uint64_t trial) {
    TrialMetrics tm;
    tm.seed = cfg.base_seed + trial;

    Rng rng_sls = Rng::for_stream(cfg.base_seed, trial, RngStream::sls_noise);
    const SlsResult sls = sls_measure(ch, grids, sigma, rng_sls);
    tm.best_sector = sls.best_sector;
    tm.sls_correct = sls.best_sector == noiseless_best;

    const Awm& awm = book.awms[static_cast<std::size_t>(sls.best_sector)];
    Rng rng_shift = Rng::for_stream(cfg.base_seed, trial, RngStream::shift_draw);
    ShiftSet shifts;
    switch (cfg.shift_kind) {
        case ShiftKind::nyquist: shifts = nyquist_shifts(awm.sector); break;
        case ShiftKind::pcs: shifts = pcs_shifts(awm.sector, m, rng_shift); break;
        case ShiftKind::rcs: shifts = rcs_shifts(cfg.n, m, rng_shift); break;
    }
    tm.mu0 = in_sector_coherence(shifts, awm.sector);

    Rng rng_cs = Rng::for_stream(cfg.base_seed, trial, RngStream::cs_noise);
    const CsInstance inst =
        assemble_cs(ch, awm, shifts, sigma, rng_cs, cfg.l_taps > 1 ? cfg.n_seq : 1);

    OmpConfig omp_cfg;
    omp_cfg.stop = OmpConfig::StopRule::residual_threshold;
    omp_cfg.residual_threshold =
        cfg.omp_residual_factor * inst.sigma * std::sqrt(static_cast<double>(shifts.count()));
    omp_cfg.max_iterations = cfg.omp_cap;
    const OmpResult rec = omp(inst, omp_cfg);

    const ComplexGrid h_hat = in_sector_estimate(rec.estimate, awm.sector);
    const ComplexGrid h_truth = masked_channel(ch.sum(), awm.sector);
    tm.nmse_den = h_truth.squared_norm();
    tm.nmse_num = (h_truth - h_hat).squared_norm();
    tm.zero_truth = tm.nmse_den == 0.0;

    const Beamformer bf = beamformer_from_estimate(h_hat, cfg.q);
    tm.rate = waterfilling_rate(effective_channel(ch, bf.grid), sigma, cfg.n_fft,
                                cfg.total_power);
    return tm;
}

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::string csv;
    json sidecar;
};

inline json config_to_json(const ExperimentConfig& c) {
    return json{{"n", c.n},
                {"n_e", c.n_e},
                {"n_a", c.n_a},
                {"q", c.q},
                {"l_taps", c.l_taps},
                {"m_list", c.m_list},
                {"snr_omni_db_list", c.snr_omni_db_list},
                {"shift_kind", shift_kind_name(c.shift_kind)},
                {"weight_mode", c.weight_mode == WeightMode::optimized ? "optimized" : "random"},
                {"trials", c.trials},
                {"base_seed", c.base_seed},
                {"output_path", c.output_path},
                {"k_min", c.k_min},
                {"k_max", c.k_max},
                {"on_grid", c.on_grid},
                {"n_seq", c.n_seq},
                {"n_fft", c.n_fft},
                {"total_power", c.total_power},
                {"omp_cap", c.omp_cap},
                {"omp_residual_factor", c.omp_residual_factor},
                {"opt_max_iters", c.opt.max_iters},
                {"opt_tol", c.opt.tol},
                {"opt_n_random_inits", c.opt.n_random_inits}};
}

inline void apply_json_overrides(ExperimentConfig& c, const json& j) {
    auto get_int = [&j](const char* key, int& out) { if (j.contains(key)) out = j.at(key).get<int>(); };
    auto get_dbl = [&j](const char* key, double& out) { if (j.contains(key)) out = j.at(key).get<double>(); };
    get_int("n", c.n);
    get_int("n_e", c.n_e);
    get_int("n_a", c.n_a);
    get_int("q", c.q);
    get_int("l_taps", c.l_taps);
    if (j.contains("m_list")) c.m_list = j.at("m_list").get<std::vector<int>>();
    if (j.contains("snr_omni_db_list"))
        c.snr_omni_db_list = j.at("snr_omni_db_list").get<std::vector<double>>();
    if (j.contains("shift_kind")) {
        const std::string k = j.at("shift_kind").get<std::string>();
        if (k == "nyquist") c.shift_kind = ShiftKind::nyquist;
        else if (k == "pcs") c.shift_kind = ShiftKind::pcs;
        else if (k == "rcs") c.shift_kind = ShiftKind::rcs;
        else throw ConfigError("invalid config fields: shift_kind");
    }
    if (j.contains("weight_mode")) {
        const std::string w = j.at("weight_mode").get<std::string>();
        if (w == "optimized") c.weight_mode = WeightMode::optimized;
        else if (w == "random") c.weight_mode = WeightMode::random;
        else throw ConfigError("invalid config fields: weight_mode");
    }
    get_int("trials", c.trials);
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    get_int("k_min", c.k_min);
    get_int("k_max", c.k_max);
    if (j.contains("on_grid")) c.on_grid = j.at("on_grid").get<bool>();
    get_int("n_seq", c.n_seq);
    get_int("n_fft", c.n_fft);
    get_dbl("total_power", c.total_power);
    get_int("omp_cap", c.omp_cap);
    get_dbl("omp_residual_factor", c.omp_residual_factor);
    get_int("opt_max_iters", c.opt.max_iters);
    get_dbl("opt_tol", c.opt.tol);
    get_int("opt_n_random_inits", c.opt.n_random_inits);
}

// Runs the full Monte-Carlo grid and renders the CSV. Trials are isolated by
// counter-derived RNG streams, so results are independent of evaluation
// order; aggregation reduces a per-trial vector in fixed order, which keeps
// the output byte-identical for a given (config, base_seed).
inline ExperimentOutput run_experiment_in_memory(const ExperimentConfig& cfg) {
    validate_config(cfg);

    const Codebook book =
        build_codebook(cfg.n, cfg.n_e, cfg.n_a, cfg.q, cfg.weight_mode, cfg.opt, cfg.base_seed);
    const std::vector<ComplexGrid> grids = codebook_grids(book);

    RandomChannelConfig ch_cfg{cfg.k_min, cfg.k_max,
                               cfg.on_grid ? ChannelMode::on_grid : ChannelMode::off_grid};
    std::vector<ChannelRealization> channels;
    channels.reserve(static_cast<std::size_t>(cfg.trials));
    double mean_energy = 0.0;
    std::vector<int> noiseless_best(static_cast<std::size_t>(cfg.trials));
    Rng rng_null(0);
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_stream(cfg.base_seed, static_cast<std::uint64_t>(t), RngStream::channel);
        channels.push_back(random_channel(ch_cfg, cfg.n, cfg.l_taps, rng));
        mean_energy += channels.back().sum().squared_norm();
        noiseless_best[static_cast<std::size_t>(t)] =
            sls_measure(channels.back(), grids, 0.0, rng_null).best_sector;
    }
    mean_energy /= cfg.trials;

    ExperimentOutput out;
    out.csv =
        "m,snr_omni_db,trials,mean_nmse,mean_rate,rate_p10,rate_p50,rate_p90,"
        "sls_accuracy,mean_mu0,skipped_zero_truth\n";
    for (double snr_db : cfg.snr_omni_db_list) {
        const double sigma = noise_sigma_for_snr(mean_energy, cfg.n, snr_db);
        for (int m : cfg.m_list) {
            std::vector<TrialMetrics> metrics(static_cast<std::size_t>(cfg.trials));
            for (int t = 0; t < cfg.trials; ++t)
                metrics[static_cast<std::size_t>(t)] =
                    run_trial(cfg, book, grids, channels[static_cast<std::size_t>(t)],
                              noiseless_best[static_cast<std::size_t>(t)], sigma, m,
                              static_cast<std::uint64_t>(t));

            ResultRow row;
            row.m = m;
            row.snr_omni_db = snr_db;
            row.trials = cfg.trials;
            double num = 0.0, den = 0.0, rate_sum = 0.0, mu_sum = 0.0;
            int correct = 0, skipped = 0;
            std::vector<double> rates;
            rates.reserve(metrics.size());
            for (const TrialMetrics& tm : metrics) {
                if (tm.zero_truth) {
                    ++skipped;
                } else {
                    num += tm.nmse_num;
                    den += tm.nmse_den;
                }
                rate_sum += tm.rate;
                rates.push_back(tm.rate);
                mu_sum += tm.mu0;
                correct += tm.sls_correct ? 1 : 0;
            }
            row.mean_nmse = den > 0.0 ? num / den : 0.0;
            row.mean_rate = rate_sum / cfg.trials;
            row.rate_p10 = detail::nearest_rank_quantile(rates, 0.10);
            row.rate_p50 = detail::nearest_rank_quantile(rates, 0.50);
            row.rate_p90 = detail::nearest_rank_quantile(rates, 0.90);
            row.sls_accuracy = static_cast<double>(correct) / cfg.trials;
            row.mean_mu0 = mu_sum / cfg.trials;
            row.skipped_zero_truth = skipped;
            out.rows.push_back(row);

            out.csv += std::to_string(row.m) + "," + format_double(row.snr_omni_db) + "," +
                       std::to_string(row.trials) + "," + format_double(row.mean_nmse) + "," +
                       format_double(row.mean_rate) + "," + format_double(row.rate_p10) + "," +
                       format_double(row.rate_p50) + "," + format_double(row.rate_p90) + "," +
                       format_double(row.sls_accuracy) + "," + format_double(row.mean_mu0) +
                       "," + std::to_string(row.skipped_zero_truth) + "\n";
        }
    }

    out.sidecar = json{{"tool_version", kToolVersion},
                       {"config", config_to_json(cfg)},
                       {"notes",
                        "snr_omni calibration uses the closed form sigma^2 = "
                        "E[||H_sum||_F^2]/(N^2*SNR_omni), an approximation of the "
                        "quasi-omni reference beam"}};
    return out;
}

inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    ExperimentOutput out = run_experiment_in_memory(cfg);
    write_text_file(cfg.output_path, out.csv);
    write_text_file(cfg.output_path + ".json", out.sidecar.dump(2) + "\n");
    return out.rows;
}

// --- codebook design command -------------------------------------------------

struct DesignConfig {
    int n = 32;
    int n_e = 2;
    int n_a = 2;
    int q = 1;
    WeightMode weight_mode = WeightMode::optimized;
    WeightOptConfig opt;
    std::uint64_t seed = 1;
    std::string output_path = "codebook.json";
    std::string mask_csv_path;  // optional
};

inline Codebook design_codebook_cmd(const DesignConfig& cfg) {
    const Codebook book =
        build_codebook(cfg.n, cfg.n_e, cfg.n_a, cfg.q, cfg.weight_mode, cfg.opt, cfg.seed);
    json doc = codebook_to_json(book);
    doc["provenance"] = json{{"tool_version", kToolVersion},
                             {"seed", cfg.seed},
                             {"weight_mode",
                              cfg.weight_mode == WeightMode::optimized ? "optimized" : "random"},
                             {"opt_max_iters", cfg.opt.max_iters},
                             {"opt_tol", cfg.opt.tol},
                             {"opt_n_random_inits", cfg.opt.n_random_inits}};
    write_text_file(cfg.output_path, doc.dump(2) + "\n");
    if (!cfg.mask_csv_path.empty()) write_text_file(cfg.mask_csv_path, mask_csv(book));
    return book;
}

// --- shift-set analysis command ------------------------------------------------

struct ShiftAnalysisConfig {
    int n = 32;
    int n_e = 4;
    int n_a = 4;
    int m = 20;
    int seeds = 200;
    std::uint64_t base_seed = 1;
    std::string output_path = "shift_analysis.csv";
};

// Emits |PSF| grids for one seeded PCS/RCS draw plus the Nyquist set, and
// mu_0 samples across seeds for PCS and RCS.
inline std::string analyze_shifts_cmd(const ShiftAnalysisConfig& cfg) {
    const SectorSpec spec(cfg.n, cfg.n_e, cfg.n_a, 0, 0);
    const bool degenerate = alias_lattice(spec).empty();
    const std::string note = degenerate ? "degenerate: alias lattice empty" : "";

    std::string csv = "record,kind,seed,row,col,value,note\n";
    auto emit_mu = [&csv, &note](const char* kind, int seed, double mu) {
        csv += "mu0," + std::string(kind) + "," + std::to_string(seed) + ",,," +
               format_double(mu) + "," + csv_field(note) + "\n";
    };
    auto emit_psf = [&csv](const char* kind, const ComplexGrid& f) {
        for (int i = 0; i < f.rows(); ++i)
            for (int j = 0; j < f.cols(); ++j)
                csv += "psf," + std::string(kind) + ",0," + std::to_string(i) + "," +
                       std::to_string(j) + "," + format_double(std::abs(f(i, j))) + ",\n";
    };

    const ShiftSet nyq = nyquist_shifts(spec);
    emit_mu("nyquist", 0, in_sector_coherence(nyq, spec));
    emit_psf("nyquist", psf(nyq));

    const int m_pcs = std::min(cfg.m, spec.comb_size());
    {
        Rng rng = Rng::for_stream(cfg.base_seed, 0, RngStream::shift_draw);
        emit_psf("pcs", psf(pcs_shifts(spec, m_pcs, rng)));
        Rng rng2 = Rng::for_stream(cfg.base_seed, 0, RngStream::generic);
        emit_psf("rcs", psf(rcs_shifts(cfg.n, cfg.m, rng2)));
    }
    for (int s = 0; s < cfg.seeds; ++s) {
        Rng rng = Rng::for_stream(cfg.base_seed, static_cast<std::uint64_t>(s), RngStream::shift_draw);
        emit_mu("pcs", s, in_sector_coherence(pcs_shifts(spec, m_pcs, rng), spec));
        Rng rng2 = Rng::for_stream(cfg.base_seed, static_cast<std::uint64_t>(s), RngStream::generic);
        emit_mu("rcs", s, in_sector_coherence(rcs_shifts(cfg.n, cfg.m, rng2), spec));
    }
    write_text_file(cfg.output_path, csv);
    return csv;
}

// --- SLS comparison command ----------------------------------------------------

struct SweepCompareConfig {
    int n = 32;
    int n_e = 2;
    int n_a = 2;
    int q = 1;
    int trials = 100;
    int k_min = 1;
    int k_max = 4;
    bool on_grid = false;
    std::uint64_t base_seed = 1;
    WeightOptConfig opt;
    std::string output_path = "sweep_compare.csv";
};

struct SweepCompareResult {
    std::vector<double> comb_powers;      // received power after SLS, per trial
    std::vector<double> baseline_powers;  // quantized contiguous baseline
    double comb_median = 0.0;
    double baseline_median = 0.0;
};

// Noiseless SLS received power, comb codebook vs the quantized contiguous
// baseline, over seeded random channels.
inline SweepCompareResult sweep_compare_cmd(const SweepCompareConfig& cfg) {
    const Codebook book = build_codebook(cfg.n, cfg.n_e, cfg.n_a, cfg.q, WeightMode::optimized,
                                         cfg.opt, cfg.base_seed);
    const std::vector<ComplexGrid> comb = codebook_grids(book);
    const std::vector<ComplexGrid> baseline =
        contiguous_baseline_codebook(cfg.n, cfg.n_e, cfg.n_a, cfg.q);

    SweepCompareResult res;
    RandomChannelConfig ch_cfg{cfg.k_min, cfg.k_max,
                               cfg.on_grid ? ChannelMode::on_grid : ChannelMode::off_grid};
    Rng rng_null(0);
    std::string csv = "trial,comb_power,baseline_power\n";
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::for_stream(cfg.base_seed, static_cast<std::uint64_t>(t), RngStream::channel);
        const ChannelRealization ch = random_channel(ch_cfg, cfg.n, 1, rng);
        const SlsResult a = sls_measure(ch, comb, 0.0, rng_null);
        const SlsResult b = sls_measure(ch, baseline, 0.0, rng_null);
        const double pa = a.powers[static_cast<std::size_t>(a.best_sector)];
        const double pb = b.powers[static_cast<std::size_t>(b.best_sector)];
        res.comb_powers.push_back(pa);
        res.baseline_powers.push_back(pb);
        csv += std::to_string(t) + "," + format_double(pa) + "," + format_double(pb) + "\n";
    }
    res.comb_median = detail::nearest_rank_quantile(res.comb_powers, 0.50);
    res.baseline_median = detail::nearest_rank_quantile(res.baseline_powers, 0.50);
    csv += "median," + format_double(res.comb_median) + "," +
           format_double(res.baseline_median) + "\n";
    if (!cfg.output_path.empty()) write_text_file(cfg.output_path, csv);
    return res;
}

}  // namespace insector
