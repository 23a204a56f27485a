// Command-line driver: codebook design, SLS comparison, Monte-Carlo pipeline
// runs and shift-set/PSF analysis. Emits CSV data plus JSON sidecars; exit
// code 0 on success, 1 on configuration errors, 2 on runtime failures.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "insector/insector.hpp"

namespace {

using namespace insector;

ShiftKind parse_shift_kind(const std::string& s) {
    if (s == "nyquist") return ShiftKind::nyquist;
    if (s == "pcs") return ShiftKind::pcs;
    if (s == "rcs") return ShiftKind::rcs;
    throw ConfigError("invalid config fields: shift_kind");
}

WeightMode parse_weight_mode(const std::string& s) {
    if (s == "optimized") return WeightMode::optimized;
    if (s == "random") return WeightMode::random;
    throw ConfigError("invalid config fields: weight_mode");
}

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    f >> j;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"comb-sector codebooks and in-sector compressive beam alignment"};
    app.require_subcommand(1);

    // ---- design ----
    auto* design = app.add_subcommand("design", "build a sector codebook and write it as JSON");
    DesignConfig dcfg;
    std::string d_mode = "optimized";
    design->add_option("--n", dcfg.n, "array side N");
    design->add_option("--n-e", dcfg.n_e, "building-block rows N_e");
    design->add_option("--n-a", dcfg.n_a, "building-block cols N_a");
    design->add_option("--q", dcfg.q, "phase shifter bits");
    design->add_option("--weight-mode", d_mode, "optimized|random");
    design->add_option("--seed", dcfg.seed, "weight optimization seed");
    design->add_option("--out", dcfg.output_path, "codebook JSON path");
    design->add_option("--mask-csv", dcfg.mask_csv_path, "optional |Z_s| CSV dump");
    design->add_option("--opt-iters", dcfg.opt.max_iters, "flatness iterations per init");
    design->add_option("--opt-tol", dcfg.opt.tol, "objective-change stop tolerance");
    design->add_option("--opt-random-inits", dcfg.opt.n_random_inits, "random restarts");

    // ---- run ----
    auto* run = app.add_subcommand("run", "run the seeded Monte-Carlo pipeline, write CSV");
    ExperimentConfig rcfg;
    std::string r_shift = "pcs", r_weights = "optimized", r_config_path;
    run->add_option("--n", rcfg.n, "array side N");
    run->add_option("--n-e", rcfg.n_e, "building-block rows N_e");
    run->add_option("--n-a", rcfg.n_a, "building-block cols N_a");
    run->add_option("--q", rcfg.q, "phase shifter bits");
    run->add_option("--l-taps", rcfg.l_taps, "wideband tap count L");
    run->add_option("--m", rcfg.m_list, "measurement counts (repeatable)");
    run->add_option("--snr-omni-db", rcfg.snr_omni_db_list, "SNR_omni values in dB (repeatable)");
    run->add_option("--shifts", r_shift, "nyquist|pcs|rcs");
    run->add_option("--weight-mode", r_weights, "optimized|random");
    run->add_option("--trials", rcfg.trials, "Monte-Carlo trials");
    run->add_option("--seed", rcfg.base_seed, "base seed");
    run->add_option("--out", rcfg.output_path, "result CSV path");
    run->add_option("--k-min", rcfg.k_min, "min ray count");
    run->add_option("--k-max", rcfg.k_max, "max ray count");
    run->add_flag("--on-grid", rcfg.on_grid, "grid-aligned ray angles");
    run->add_option("--n-seq", rcfg.n_seq, "spreading gain for wideband measurements");
    run->add_option("--n-fft", rcfg.n_fft, "rate evaluation subcarriers");
    run->add_option("--total-power", rcfg.total_power, "waterfilling power budget");
    run->add_option("--omp-cap", rcfg.omp_cap, "max OMP atoms (0 = min(M, N^2/S))");
    run->add_option("--omp-residual-factor", rcfg.omp_residual_factor,
                    "stop when ||r|| <= factor*sigma*sqrt(M)");
    run->add_option("--config", r_config_path, "JSON config; overrides flags");

    // ---- sweep-analysis ----
    auto* sweep = app.add_subcommand(
        "sweep-analysis", "noiseless SLS received power: comb vs contiguous baseline");
    SweepCompareConfig scfg;
    sweep->add_option("--n", scfg.n, "array side N");
    sweep->add_option("--n-e", scfg.n_e, "building-block rows N_e");
    sweep->add_option("--n-a", scfg.n_a, "building-block cols N_a");
    sweep->add_option("--q", scfg.q, "phase shifter bits");
    sweep->add_option("--trials", scfg.trials, "channel realizations");
    sweep->add_option("--k-min", scfg.k_min, "min ray count");
    sweep->add_option("--k-max", scfg.k_max, "max ray count");
    sweep->add_flag("--on-grid", scfg.on_grid, "grid-aligned ray angles");
    sweep->add_option("--seed", scfg.base_seed, "base seed");
    sweep->add_option("--out", scfg.output_path, "per-trial CSV path");

    // ---- psf ----
    auto* psfc = app.add_subcommand("psf", "PSF grids and coherence samples for PCS/RCS");
    ShiftAnalysisConfig pcfg;
    psfc->add_option("--n", pcfg.n, "array side N");
    psfc->add_option("--n-e", pcfg.n_e, "building-block rows N_e");
    psfc->add_option("--n-a", pcfg.n_a, "building-block cols N_a");
    psfc->add_option("--m", pcfg.m, "measurement count");
    psfc->add_option("--seeds", pcfg.seeds, "coherence sample count");
    psfc->add_option("--seed", pcfg.base_seed, "base seed");
    psfc->add_option("--out", pcfg.output_path, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (design->parsed()) {
            dcfg.weight_mode = parse_weight_mode(d_mode);
            const Codebook book = design_codebook_cmd(dcfg);
            std::cout << "wrote codebook with " << book.awms.size() << " sectors to "
                      << dcfg.output_path << "\n";
        } else if (run->parsed()) {
            rcfg.shift_kind = parse_shift_kind(r_shift);
            rcfg.weight_mode = parse_weight_mode(r_weights);
            if (!r_config_path.empty()) apply_json_overrides(rcfg, load_json(r_config_path));
            const auto rows = run_experiment(rcfg);
            std::cout << "wrote " << rows.size() << " result rows to " << rcfg.output_path
                      << "\n";
        } else if (sweep->parsed()) {
            const SweepCompareResult res = sweep_compare_cmd(scfg);
            std::cout << "median SLS power comb=" << res.comb_median
                      << " baseline=" << res.baseline_median << " (" << scfg.output_path
                      << ")\n";
        } else if (psfc->parsed()) {
            analyze_shifts_cmd(pcfg);
            std::cout << "wrote shift analysis to " << pcfg.output_path << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
