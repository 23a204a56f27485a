#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "insector/channel.hpp"
#include "insector/codebook.hpp"
#include "insector/sector.hpp"
#include "insector/shifts.hpp"

namespace insector {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest round-trippable decimal form; bit-stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

// RFC-4180-style quoting: wrap fields containing separators or quotes.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << body;
    if (!f) throw std::runtime_error("write failed: " + path);
}

// --- channels ----------------------------------------------------------------

// seed is provenance metadata (which draw produced these rays); replay only
// needs the rays themselves.
inline json channel_to_json(const ChannelRealization& ch, std::uint64_t seed = 0) {
    json rays = json::array();
    for (const Ray& r : ch.rays)
        rays.push_back({{"gain_re", r.gain.real()},
                        {"gain_im", r.gain.imag()},
                        {"omega_e", r.omega_e},
                        {"omega_a", r.omega_a},
                        {"tap", r.tap}});
    return json{{"n", ch.n},
                {"l_taps", ch.l_taps()},
                {"mode", ch.mode == ChannelMode::on_grid ? "on_grid" : "off_grid"},
                {"seed", seed},
                {"rays", rays}};
}

inline ChannelRealization channel_from_json(const json& j) {
    std::vector<Ray> rays;
    for (const json& r : j.at("rays"))
        rays.push_back(Ray{cdouble(r.at("gain_re").get<double>(), r.at("gain_im").get<double>()),
                           r.at("omega_e").get<double>(), r.at("omega_a").get<double>(),
                           r.at("tap").get<int>()});
    const ChannelMode mode =
        j.at("mode").get<std::string>() == "on_grid" ? ChannelMode::on_grid : ChannelMode::off_grid;
    return synth_channel(rays, j.at("n").get<int>(), j.at("l_taps").get<int>(), mode);
}

// --- shift sets --------------------------------------------------------------

inline json shift_set_to_json(const ShiftSet& s) {
    json shifts = json::array();
    for (const auto& [r, c] : s.shifts) shifts.push_back(json::array({r, c}));
    return json{{"n", s.n}, {"kind", shift_kind_name(s.kind)}, {"shifts", shifts}};
}

inline ShiftSet shift_set_from_json(const json& j) {
    ShiftSet out;
    out.n = j.at("n").get<int>();
    const std::string kind = j.at("kind").get<std::string>();
    out.kind = kind == "nyquist" ? ShiftKind::nyquist
                                 : (kind == "pcs" ? ShiftKind::pcs : ShiftKind::rcs);
    for (const json& p : j.at("shifts")) out.shifts.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    return out;
}

// --- codebooks ---------------------------------------------------------------

inline std::vector<std::vector<int>> phase_index_rows(const ComplexGrid& g, int q,
                                                      double magnitude) {
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(g.rows()));
    for (int i = 0; i < g.rows(); ++i) {
        rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(g.cols()));
        for (int j = 0; j < g.cols(); ++j) {
            if (qq_distance(g(i, j), q, magnitude) > 1e-9)
                throw std::runtime_error("phase_index_rows: entry off the Q_q grid");
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                quantize_phase_index(std::arg(g(i, j)), q);
        }
    }
    return rows;
}

inline ComplexGrid grid_from_phase_indices(const std::vector<std::vector<int>>& rows, int q,
                                           double magnitude) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
    ComplexGrid g(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            g(i, j) = qq_value(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], q, magnitude);
    return g;
}

inline json codebook_to_json(const Codebook& book) {
    json sectors = json::array();
    for (const Awm& a : book.awms) {
        sectors.push_back({{"k_e", a.sector.k_e},
                           {"k_a", a.sector.k_a},
                           {"weight_phase_indices",
                            phase_index_rows(a.weights, a.q, weight_magnitude(a.sector))},
                           {"awm_phase_indices", phase_index_rows(a.grid, a.q, 1.0 / a.sector.n)},
                           {"uniformity", make_spectral_mask(a).uniformity}});
    }
    return json{{"tool_version", kToolVersion},
                {"n", book.n},
                {"n_e", book.n_e},
                {"n_a", book.n_a},
                {"q", book.q},
                {"sectors", sectors}};
}

inline Codebook codebook_from_json(const json& j) {
    Codebook book;
    book.n = j.at("n").get<int>();
    book.n_e = j.at("n_e").get<int>();
    book.n_a = j.at("n_a").get<int>();
    book.q = j.at("q").get<int>();
    book.awms.reserve(j.at("sectors").size());
    for (const json& sec : j.at("sectors")) {
        const SectorSpec spec(book.n, book.n_e, book.n_a, sec.at("k_e").get<int>(),
                              sec.at("k_a").get<int>());
        const ComplexGrid w = grid_from_phase_indices(
            sec.at("weight_phase_indices").get<std::vector<std::vector<int>>>(), book.q,
            weight_magnitude(spec));
        Awm awm = assemble_awm(spec, w, book.q);
        // cross-check the stored AWM against the reassembled one
        const auto stored = sec.at("awm_phase_indices").get<std::vector<std::vector<int>>>();
        const auto rebuilt = phase_index_rows(awm.grid, book.q, 1.0 / book.n);
        if (stored != rebuilt)
            throw std::runtime_error("codebook_from_json: stored AWM does not match its weights");
        book.awms.push_back(std::move(awm));
    }
    return book;
}

// CSV dump of mask magnitudes, one row per beamspace cell, for heatmap plots.
inline std::string mask_csv(const Codebook& book) {
    std::string out = "sector,k_e,k_a,row,col,abs_mask\n";
    for (const Awm& a : book.awms) {
        const ComplexGrid z = spectral_mask(a.grid);
        for (int i = 0; i < z.rows(); ++i)
            for (int j = 0; j < z.cols(); ++j)
                out += std::to_string(a.sector.sector_index()) + "," +
                       std::to_string(a.sector.k_e) + "," + std::to_string(a.sector.k_a) + "," +
                       std::to_string(i) + "," + std::to_string(j) + "," +
                       format_double(std::abs(z(i, j))) + "\n";
    }
    return out;
}

}  // namespace insector
