// config.hpp
// Experiment configuration: JSON schema with field-path diagnostics, a
// canonical content hash, and the run manifest.
#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "difflab/perturb.hpp"
#include "difflab/pointset.hpp"
#include "difflab/spectral.hpp"

namespace difflab {

using json = nlohmann::json;

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace cfg {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw config_error("config: missing field '" + path + key + "'");
    return j.at(key);
}

inline double require_number(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) throw config_error("config: field '" + path + key + "' must be a number");
    return v.get<double>();
}

inline std::string require_string(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) throw config_error("config: field '" + path + key + "' must be a string");
    return v.get<std::string>();
}

inline Mat parse_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty() || !v.front().is_array())
        throw config_error("config: field '" + path + "' must be a matrix (array of rows)");
    Mat m(static_cast<int>(v.size()), static_cast<int>(v.front().size()));
    for (int r = 0; r < m.rows; ++r) {
        const json& row = v.at(static_cast<size_t>(r));
        if (static_cast<int>(row.size()) != m.cols)
            throw config_error("config: ragged matrix in '" + path + "'");
        for (int c = 0; c < m.cols; ++c) m(r, c) = row.at(static_cast<size_t>(c)).get<double>();
    }
    return m;
}

inline Vec parse_vec(const json& v, const std::string& path) {
    if (!v.is_array()) throw config_error("config: field '" + path + "' must be an array");
    Vec out(static_cast<int>(v.size()));
    for (int c = 0; c < out.dim; ++c) out[c] = v.at(static_cast<size_t>(c)).get<double>();
    return out;
}

}  // namespace cfg

// ---------------------------------------------------------------------------
// Sub-spec parsing.
// ---------------------------------------------------------------------------
inline CutProjectScheme parse_scheme(const json& g, const std::string& path) {
    if (g.contains("preset")) {
        std::string preset = g.at("preset").get<std::string>();
        if (preset == "fibonacci") return fibonacci_scheme();
        throw config_error("config: unknown scheme preset '" + preset + "' at '" + path + "preset'");
    }
    CutProjectScheme s;
    s.n = static_cast<int>(cfg::require_number(g, "n", path));
    s.d = static_cast<int>(cfg::require_number(g, "d", path));
    s.lattice_basis = cfg::parse_matrix(cfg::require(g, "lattice_basis", path), path + "lattice_basis");
    s.proj_phys = cfg::parse_matrix(cfg::require(g, "proj_phys", path), path + "proj_phys");
    s.proj_int = cfg::parse_matrix(cfg::require(g, "proj_int", path), path + "proj_int");
    const json& w = cfg::require(g, "window", path);
    std::string shape = cfg::require_string(w, "shape", path + "window.");
    if (shape == "box") {
        s.window = Window::box(cfg::parse_vec(cfg::require(w, "lo", path + "window."), path),
                               cfg::parse_vec(cfg::require(w, "hi", path + "window."), path),
                               w.value("half_open", false));
    } else if (shape == "ball") {
        s.window = Window::ball(cfg::parse_vec(cfg::require(w, "center", path + "window."), path),
                                cfg::require_number(w, "radius", path + "window."));
    } else {
        throw config_error("config: field '" + path + "window.shape' must be box or ball");
    }
    return s;
}

inline GeneratorSpec parse_generator(const json& g) {
    const std::string path = "generator.";
    std::string kind = cfg::require_string(g, "kind", path);
    GeneratorSpec spec;
    if (kind == "lattice") {
        int dim = static_cast<int>(cfg::require_number(g, "dim", path));
        Lattice lat = g.contains("basis")
                          ? Lattice{dim, cfg::parse_matrix(g.at("basis"), path + "basis")}
                          : Lattice::cubic(dim);
        spec = GeneratorSpec::make_lattice(lat);
    } else if (kind == "cut_and_project") {
        spec = GeneratorSpec::make_cut_project(parse_scheme(g, path));
    } else if (kind == "visible_points") {
        spec = GeneratorSpec::make_visible(static_cast<int>(cfg::require_number(g, "dim", path)));
    } else if (kind == "deformed_lattice") {
        int dim = static_cast<int>(cfg::require_number(g, "dim", path));
        Lattice lat = g.contains("basis")
                          ? Lattice{dim, cfg::parse_matrix(g.at("basis"), path + "basis")}
                          : Lattice::cubic(dim);
        DeformationSpec def;
        def.linear_part = g.contains("linear_part")
                              ? cfg::parse_matrix(g.at("linear_part"), path + "linear_part")
                              : Mat::identity(dim);
        def.decay_amplitude = cfg::require_number(g, "amplitude", path);
        def.decay_exponent = cfg::require_number(g, "exponent", path);
        def.direction_seed = static_cast<uint64_t>(g.value("direction_seed", 0.0));
        spec = GeneratorSpec::make_deformed(lat, def);
    } else {
        throw config_error("config: unknown generator kind '" + kind + "'");
    }
    if (g.contains("point_cap")) spec.cap = static_cast<size_t>(g.at("point_cap").get<double>());
    return spec;
}

inline Distribution parse_distribution(const json& d, int dim, const std::string& path) {
    std::string kind = cfg::require_string(d, "kind", path);
    if (kind == "dirac0") return Distribution::dirac0(dim);
    if (kind == "gaussian_iso")
        return Distribution::gaussian_iso(dim, cfg::require_number(d, "sigma", path));
    if (kind == "uniform_box")
        return Distribution::uniform_box(dim, cfg::require_number(d, "half_width", path));
    if (kind == "heavy_tail")
        return Distribution::heavy_tail(dim, cfg::require_number(d, "alpha", path),
                                        d.value("scale", 1.0));
    if (kind == "gaussian_mixture") {
        std::vector<double> w = cfg::require(d, "weights", path).get<std::vector<double>>();
        std::vector<double> s = cfg::require(d, "sigmas", path).get<std::vector<double>>();
        std::vector<Vec> means;
        for (const json& m : cfg::require(d, "means", path)) means.push_back(cfg::parse_vec(m, path));
        return Distribution::gaussian_mixture(dim, std::move(w), std::move(s), std::move(means));
    }
    throw config_error("config: unknown distribution kind '" + kind + "' at '" + path + "kind'");
}

// variant "none" maps to the zero law: the pipeline then treats the set as
// unperturbed.
inline PerturbationModel parse_model(const json& m, int dim, const GeneratorSpec& gen) {
    const std::string path = "model.";
    std::string variant = cfg::require_string(m, "variant", path);
    uint64_t seed = static_cast<uint64_t>(m.value("seed", 0.0));
    if (variant == "none")
        return PerturbationModel::iid(Distribution::dirac0(dim), seed);
    Distribution dist = parse_distribution(cfg::require(m, "dist", path), dim, path + "dist.");
    if (variant == "iid") return PerturbationModel::iid(dist, seed);
    if (variant == "shell_mixing") {
        std::vector<double> shells = cfg::require(m, "shells", path).get<std::vector<double>>();
        return PerturbationModel::shell_mixing(dist, shells, m.value("coupling", 0.0), seed);
    }
    if (variant == "lattice_ar")
        return PerturbationModel::lattice_ar(dist, cfg::require_number(m, "rho", path), seed);
    if (variant == "stationary_cp") {
        if (gen.kind != GeneratorSpec::Kind::CutProject)
            throw config_error("config: model.variant stationary_cp requires a cut_and_project generator");
        return PerturbationModel::stationary_cp(gen.scheme, dist,
                                                cfg::require_number(m, "correlation_length", path),
                                                seed, m.value("force_zero_shift", false));
    }
    throw config_error("config: unknown model variant '" + variant + "'");
}

struct FrequencySpecConfig {
    enum class Kind { DualLattice, DualModule, Grid, Explicit } kind = Kind::DualLattice;
    double max_norm = 2.0;
    double intensity_floor = 0.25;
    int count = 0;            // dual-module: keep the strongest `count` (0 = all)
    bool positive_only = false;
    double extent = 1.0, step = 0.5;
    std::vector<Vec> values;

    FrequencySet build(const GeneratorSpec& gen) const {
        switch (kind) {
            case Kind::DualLattice: {
                Lattice lat = gen.kind == GeneratorSpec::Kind::Lattice ||
                                      gen.kind == GeneratorSpec::Kind::DeformedLattice
                                  ? gen.lattice
                                  : Lattice::cubic(gen.dim());
                return dual_lattice_frequencies(lat, max_norm);
            }
            case Kind::DualModule: {
                if (gen.kind != GeneratorSpec::Kind::CutProject)
                    throw config_error("config: frequencies.kind dual_module needs a cut_and_project generator");
                auto entries = dual_module_frequencies(gen.scheme, intensity_floor, max_norm);
                std::vector<Vec> picked;
                for (const auto& e : entries) {
                    if (e.lambda.norm() <= 1e-12) continue;
                    if (positive_only && e.lambda[0] <= 0) continue;
                    picked.push_back(e.lambda);
                    if (count > 0 && static_cast<int>(picked.size()) >= count) break;
                }
                return FrequencySet::explicit_set(gen.dim(), picked, "dual_module");
            }
            case Kind::Grid:
                return uniform_grid_frequencies(gen.dim(), extent, step);
            case Kind::Explicit:
                return FrequencySet::explicit_set(gen.dim(), values);
        }
        throw std::logic_error("frequency spec");
    }
};

inline FrequencySpecConfig parse_frequencies(const json& f, int dim) {
    const std::string path = "frequencies.";
    FrequencySpecConfig out;
    std::string kind = cfg::require_string(f, "kind", path);
    if (kind == "dual_lattice") {
        out.kind = FrequencySpecConfig::Kind::DualLattice;
        out.max_norm = f.value("max_norm", 2.0);
    } else if (kind == "dual_module") {
        out.kind = FrequencySpecConfig::Kind::DualModule;
        out.max_norm = f.value("max_norm", 6.0);
        out.intensity_floor = f.value("intensity_floor", 0.25);
        out.count = f.value("count", 0);
        out.positive_only = f.value("positive_only", false);
    } else if (kind == "grid") {
        out.kind = FrequencySpecConfig::Kind::Grid;
        out.extent = cfg::require_number(f, "extent", path);
        out.step = cfg::require_number(f, "step", path);
    } else if (kind == "explicit") {
        out.kind = FrequencySpecConfig::Kind::Explicit;
        for (const json& v : cfg::require(f, "values", path)) {
            Vec vec = cfg::parse_vec(v, path + "values");
            if (vec.dim != dim) throw config_error("config: frequency dimension mismatch in 'frequencies.values'");
            out.values.push_back(vec);
        }
    } else {
        throw config_error("config: unknown frequencies kind '" + kind + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration.
// ---------------------------------------------------------------------------
inline const std::set<std::string> kKnownAnalyses = {
    "spectrum", "recover", "gamma", "escape", "strungaru", "structure", "hellinger", "slln"};

struct ExperimentConfig {
    json raw;
    GeneratorSpec generator;
    PerturbationModel model;
    bool has_model = false;  // false when variant == "none"
    FrequencySpecConfig frequencies;
    std::vector<double> r_schedule;
    std::vector<uint64_t> seeds;
    std::vector<std::string> analyses;
    std::filesystem::path output_dir = "out";
    double cloak_threshold = 0.05;
    bool plot = false;

    // analysis knobs
    double lag_radius = 0.0;          // 0: min(R/15, 10)
    double smoothing_width = 0.5;
    size_t n_realizations = 50;
    double bump_width = 0.15;
    double grid_extent = 0.6;
    double grid_step = 0.025;
    size_t slln_n = 1'000'000;
    double ar_beta = 0.5;

    static ExperimentConfig parse(const json& j);
    static ExperimentConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw config_error("config: cannot open " + path.string());
        json j = json::parse(in, nullptr, true, true);  // allow comments
        return parse(j);
    }
};

inline ExperimentConfig ExperimentConfig::parse(const json& j) {
    ExperimentConfig c;
    c.raw = j;
    c.generator = parse_generator(cfg::require(j, "generator", ""));
    const int dim = c.generator.dim();

    if (j.contains("model")) {
        c.model = parse_model(j.at("model"), dim, c.generator);
        c.has_model = cfg::require_string(j.at("model"), "variant", "model.") != "none";
    } else {
        c.model = PerturbationModel::iid(Distribution::dirac0(dim), 0);
    }

    c.frequencies = j.contains("frequencies")
                        ? parse_frequencies(j.at("frequencies"), dim)
                        : FrequencySpecConfig{};

    const json& rs = cfg::require(j, "r_schedule", "");
    if (!rs.is_array() || rs.empty()) throw config_error("config: field 'r_schedule' must be a nonempty array");
    for (const json& v : rs) c.r_schedule.push_back(v.get<double>());
    for (size_t i = 1; i < c.r_schedule.size(); ++i)
        if (c.r_schedule[i] <= c.r_schedule[i - 1])
            throw config_error("config: field 'r_schedule' must be strictly increasing");

    if (j.contains("seeds"))
        for (const json& v : j.at("seeds")) c.seeds.push_back(static_cast<uint64_t>(v.get<double>()));

    const json& an = cfg::require(j, "analyses", "");
    if (!an.is_array() || an.empty()) throw config_error("config: field 'analyses' must name at least one analysis");
    for (const json& v : an) {
        std::string name = v.get<std::string>();
        if (!kKnownAnalyses.count(name)) throw config_error("config: unknown analysis '" + name + "'");
        c.analyses.push_back(name);
    }

    const bool stochastic =
        c.has_model &&
        std::any_of(c.analyses.begin(), c.analyses.end(), [](const std::string& a) {
            return a != "slln" && a != "spectrum";
        });
    if (stochastic && c.seeds.empty())
        throw config_error("config: field 'seeds' must be nonempty for stochastic analyses");

    c.output_dir = j.value("output_dir", std::string("out"));
    c.cloak_threshold = j.value("cloak_threshold", 0.05);
    if (!(c.cloak_threshold > 0.0 && c.cloak_threshold < 1.0))
        throw config_error("config: field 'cloak_threshold' must lie in (0,1)");
    c.plot = j.value("plot", false);
    c.lag_radius = j.value("lag_radius", 0.0);
    c.smoothing_width = j.value("smoothing_width", 0.5);
    c.n_realizations = static_cast<size_t>(j.value("n_realizations", 50.0));
    c.bump_width = j.value("bump_width", 0.15);
    c.grid_extent = j.value("grid_extent", 0.6);
    c.grid_step = j.value("grid_step", 0.025);
    c.slln_n = static_cast<size_t>(j.value("slln_n", 1000000.0));
    c.ar_beta = j.value("ar_beta", 0.5);
    return c;
}

// Canonical content hash: nlohmann objects are key-sorted, so dump() is a
// canonical serialization and the hash is insensitive to key order.
inline uint64_t config_hash(const json& j) { return fnv1a64(j.dump()); }

// ---------------------------------------------------------------------------
// Run manifest.
// ---------------------------------------------------------------------------
struct RunManifest {
    uint64_t config_hash = 0;
    std::string version;
    std::string created_utc;
    std::vector<std::string> outputs;
    std::vector<std::pair<uint64_t, std::string>> seed_status;   // seed -> ok/failed
    std::vector<std::pair<std::string, bool>> analysis_status;   // analysis -> pass

    bool all_ok() const {
        for (const auto& [_, ok] : analysis_status)
            if (!ok) return false;
        for (const auto& [_, st] : seed_status)
            if (st != "ok") return false;
        return true;
    }

    json to_json() const {
        json j;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
        j["config_hash"] = buf;
        j["version"] = version;
        j["created_utc"] = created_utc;
        j["outputs"] = outputs;
        j["seeds"] = json::array();
        for (const auto& [seed, status] : seed_status)
            j["seeds"].push_back({{"seed", seed}, {"status", status}});
        j["analyses"] = json::array();
        for (const auto& [name, ok] : analysis_status)
            j["analyses"].push_back({{"name", name}, {"pass", ok}});
        return j;
    }
};

}  // namespace difflab
