// io.hpp
// CSV and JSON serialization. All floating-point fields are printed with 17
// significant digits so files round-trip bit-exactly.
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "difflab/appendix.hpp"
#include "difflab/recover.hpp"
#include "difflab/spectral.hpp"

namespace difflab {

using json = nlohmann::json;

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Point sets: CSV body plus a JSON sidecar with the metadata.
// ---------------------------------------------------------------------------
inline std::filesystem::path sidecar_path(std::filesystem::path csv) {
    csv.replace_extension(".json");
    return csv;
}

inline void write_pointset_csv(const PointSet& ps, const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    for (int c = 0; c < ps.dim; ++c) out << (c ? "," : "") << "x" << (c + 1);
    out << "\n";
    for (size_t i = 0; i < ps.size(); ++i) {
        for (int c = 0; c < ps.dim; ++c) out << (c ? "," : "") << format_g17(ps.point(i)[c]);
        out << "\n";
    }

    json side;
    side["dim"] = ps.dim;
    side["generation_radius"] = ps.generation_radius;
    if (std::isfinite(ps.separation_radius)) side["separation_radius"] = ps.separation_radius;
    if (ps.claimed_density) side["claimed_density"] = *ps.claimed_density;
    side["descriptor"]["generator"] = ps.descriptor.generator;
    for (const auto& [k, v] : ps.descriptor.params) side["descriptor"]["params"][k] = v;
    std::ofstream meta = detail::open_out(sidecar_path(path));
    meta << side.dump(2) << "\n";
}

inline PointSet read_pointset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string header;
    std::getline(in, header);
    int dim = header.empty() ? 0 : 1;
    for (char ch : header)
        if (ch == ',') ++dim;
    PointSet ps;
    ps.dim = dim;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) ps.xs.push_back(std::stod(cell));
    }
    std::filesystem::path meta = sidecar_path(path);
    if (std::filesystem::exists(meta)) {
        std::ifstream ms(meta);
        json side = json::parse(ms);
        ps.generation_radius = side.value("generation_radius", 0.0);
        if (side.contains("separation_radius")) ps.separation_radius = side["separation_radius"];
        if (side.contains("claimed_density")) ps.claimed_density = side["claimed_density"];
        if (side.contains("descriptor")) {
            ps.descriptor.generator = side["descriptor"].value("generator", "");
        }
    }
    ps.compute_keys();
    return ps;
}

inline void write_perturbed_csv(const PerturbedPointSet& pps, const std::filesystem::path& base_path,
                                const std::filesystem::path& disp_path) {
    write_pointset_csv(pps.base, base_path);
    std::ofstream out = detail::open_out(disp_path);
    for (int c = 0; c < pps.dim(); ++c) out << (c ? "," : "") << "d" << (c + 1);
    out << "\n";
    for (size_t i = 0; i < pps.size(); ++i) {
        for (int c = 0; c < pps.dim(); ++c)
            out << (c ? "," : "") << format_g17(pps.displacements[i * pps.dim() + c]);
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Spectral and autocorrelation tables.
// ---------------------------------------------------------------------------
inline const char* kind_name(SpectralKind k) {
    switch (k) {
        case SpectralKind::FourierSum: return "fourier_sum";
        case SpectralKind::Periodogram: return "periodogram";
        case SpectralKind::Recovered: return "recovered";
    }
    return "unknown";
}

inline void write_spectral_csv(const std::vector<SpectralEstimate>& rows, int dim,
                               const std::filesystem::path& path, bool append = false) {
    std::ofstream out;
    if (append && std::filesystem::exists(path)) {
        out.open(path, std::ios::app);
    } else {
        out = detail::open_out(path);
        for (int c = 0; c < dim; ++c) out << "lambda_" << (c + 1) << ",";
        out << "re,im,R,kind\n";
    }
    for (const auto& e : rows) {
        for (int c = 0; c < dim; ++c) out << format_g17(e.frequency[c]) << ",";
        out << format_g17(e.value.real()) << "," << format_g17(e.value.imag()) << ","
            << format_g17(e.R) << "," << kind_name(e.kind) << "\n";
    }
}

inline void write_autocorr_csv(const AutocorrEstimate& ac, const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    for (int c = 0; c < ac.dim; ++c) out << "k_" << (c + 1) << ",";
    out << "re,im,pair_count\n";
    for (size_t i = 0; i < ac.lags.size(); ++i) {
        for (int c = 0; c < ac.dim; ++c) out << format_g17(ac.lags[i][c]) << ",";
        out << format_g17(ac.coefficients[i].real()) << "," << format_g17(ac.coefficients[i].imag())
            << "," << ac.pair_counts[i] << "\n";
    }
}

inline void write_structure_csv(const StructureFactorEstimate& sf,
                                const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    const int dim = sf.freqs.empty() ? 0 : sf.freqs.front().dim;
    for (int c = 0; c < dim; ++c) out << "lambda_" << (c + 1) << ",";
    out << "S,stderr,n\n";
    for (size_t i = 0; i < sf.freqs.size(); ++i) {
        for (int c = 0; c < dim; ++c) out << format_g17(sf.freqs[i][c]) << ",";
        out << format_g17(sf.S[i]) << "," << format_g17(sf.std_error[i]) << "," << sf.n_realizations
            << "\n";
    }
}

inline void write_trace_csv(const std::vector<std::pair<double, double>>& rows,
                            const std::filesystem::path& path, const std::string& xname = "n",
                            const std::string& yname = "value") {
    std::ofstream out = detail::open_out(path);
    out << xname << "," << yname << "\n";
    for (const auto& [x, y] : rows) out << format_g17(x) << "," << format_g17(y) << "\n";
}

inline void write_grid_csv(const GriddedMeasure& g, const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    for (int c = 0; c < g.dim; ++c) out << "cell_" << (c + 1) << ",";
    out << "density\n";
    for (size_t i = 0; i < g.densities.size(); ++i) {
        size_t rem = i;
        std::array<size_t, kMaxDim> idx{};
        for (int c = g.dim - 1; c >= 0; --c) {
            idx[static_cast<size_t>(c)] = rem % static_cast<size_t>(g.counts[static_cast<size_t>(c)]);
            rem /= static_cast<size_t>(g.counts[static_cast<size_t>(c)]);
        }
        for (int c = 0; c < g.dim; ++c) out << idx[static_cast<size_t>(c)] << ",";
        out << format_g17(g.densities[i]) << "\n";
    }
}

inline json recovery_to_json(const RecoveryReport& rep, int dim) {
    json j;
    j["R"] = rep.R;
    j["seed"] = rep.seed;
    j["cloak_threshold"] = rep.tolerance;
    if (!rep.model_note.empty()) j["model"] = rep.model_note;
    j["entries"] = json::array();
    for (const auto& e : rep.entries) {
        json row;
        row["lambda"] = json::array();
        for (int c = 0; c < dim; ++c) row["lambda"].push_back(e.lambda[c]);
        row["measured_re"] = e.measured.real();
        row["measured_im"] = e.measured.imag();
        row["phi_re"] = e.phi.real();
        row["phi_im"] = e.phi.imag();
        row["cloaked"] = e.cloaked;
        if (e.recovered) {
            row["recovered_re"] = e.recovered->real();
            row["recovered_im"] = e.recovered->imag();
        }
        if (e.reference) {
            row["reference_re"] = e.reference->real();
            row["reference_im"] = e.reference->imag();
        }
        if (e.abs_error) row["abs_error"] = *e.abs_error;
        j["entries"].push_back(row);
    }
    return j;
}

inline void write_recovery_json(const RecoveryReport& rep, int dim,
                                const std::filesystem::path& path) {
    std::ofstream out = detail::open_out(path);
    out << recovery_to_json(rep, dim).dump(2) << "\n";
}

// Generic numeric table reader (for plotting).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable read_csv_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    CsvTable t;
    std::string line;
    if (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) t.header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (...) {
                vals.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        t.rows.push_back(std::move(vals));
    }
    return t;
}

}  // namespace difflab
