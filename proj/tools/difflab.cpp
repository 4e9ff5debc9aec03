// difflab: config-driven simulation and verification runner for
// quasi-periodic point sets under random displacement fields.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "difflab/io.hpp"
#include "difflab/presets.hpp"
#include "difflab/runner.hpp"

using namespace difflab;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    int64_t seed = -1;
    double cloak_threshold = -1.0;
    int threads = 0;
    bool plot = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment config");
    cmd->add_option("--preset", o.preset, "built-in config name (see `difflab presets`)");
    cmd->add_option("--out", o.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", o.seed, "replace the seed list with this single seed");
    cmd->add_option("--cloak-threshold", o.cloak_threshold, "cloaking threshold in (0,1)");
    cmd->add_option("--threads", o.threads, "worker threads (DIFFLAB_THREADS fallback, default 1)");
    cmd->add_flag("--plot", o.plot, "also emit SVG plots");
}

ExperimentConfig load_config(const CommonOpts& o) {
    json j;
    if (!o.preset.empty()) {
        const auto& presets = preset_configs();
        auto it = presets.find(o.preset);
        if (it == presets.end()) throw config_error("unknown preset '" + o.preset + "'");
        j = json::parse(it->second);
    } else if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw config_error("config: cannot open " + o.config_path);
        j = json::parse(in, nullptr, true, true);
    } else {
        throw config_error("either --config or --preset is required");
    }
    if (!o.out_dir.empty()) j["output_dir"] = o.out_dir;
    if (o.seed >= 0) j["seeds"] = {static_cast<uint64_t>(o.seed)};
    if (o.cloak_threshold > 0) j["cloak_threshold"] = o.cloak_threshold;
    if (o.plot) j["plot"] = true;
    return ExperimentConfig::parse(j);
}

ExperimentConfig with_analyses(ExperimentConfig c, std::vector<std::string> analyses) {
    c.analyses = std::move(analyses);
    json a = json::array();
    for (const auto& name : c.analyses) a.push_back(name);
    c.raw["analyses"] = a;
    return c;
}

int cmd_generate(const CommonOpts& o) {
    ExperimentConfig c = load_config(o);
    const double Rmax = c.r_schedule.back();
    PointSet ps = c.generator.generate(Rmax);
    std::filesystem::create_directories(c.output_dir);
    write_pointset_csv(ps, c.output_dir / "points.csv");
    auto dens = estimate_density(ps, c.r_schedule);
    std::vector<std::pair<double, double>> rows, disc;
    for (const auto& d : dens) {
        rows.emplace_back(d.R, d.density);
        if (d.discrepancy) disc.emplace_back(d.R, *d.discrepancy);
    }
    write_trace_csv(rows, c.output_dir / "density.csv", "R", "density");
    if (!disc.empty()) write_trace_csv(disc, c.output_dir / "density_discrepancy.csv", "R", "discrepancy");
    std::printf("generated %zu points (dim %d) -> %s\n", ps.size(), ps.dim,
                (c.output_dir / "points.csv").string().c_str());
    return 0;
}

int cmd_perturb(const CommonOpts& o) {
    ExperimentConfig c = load_config(o);
    if (!c.has_model) throw config_error("perturb: config has no displacement model");
    const double Rmax = c.r_schedule.back();
    PointSet ps = c.generator.generate(Rmax + 10.0 * c.model.dist.sigma_equivalent());
    uint64_t seed = c.seeds.empty() ? c.model.seed : c.seeds.front();
    PerturbedPointSet pps;
    if (c.model.kind == PerturbationModel::Kind::StationaryCP)
        pps = stationary_cp_field(c.model.scheme, c.model.dist, c.model.correlation_length, seed,
                                  ps.generation_radius, c.model.force_zero_shift);
    else {
        PerturbationModel m = c.model;
        m.seed = seed;
        pps = displace(ps, m);
    }
    std::filesystem::create_directories(c.output_dir);
    write_perturbed_csv(pps, c.output_dir / "base.csv", c.output_dir / "displacements.csv");
    std::printf("perturbed %zu points (seed %llu) -> %s\n", pps.size(),
                static_cast<unsigned long long>(seed), c.output_dir.string().c_str());
    return 0;
}

int run_and_report(const ExperimentConfig& c, int threads, bool as_verify) {
    RunManifest m = run_experiment(c, threads);
    for (const auto& [name, ok] : m.analysis_status)
        std::printf("%s %s\n", ok ? "PASS" : "FAIL", name.c_str());
    if (as_verify) return m.all_ok() ? 0 : 1;
    return 0;
}

int cmd_plot(const std::string& in, const std::string& out_path, const std::string& kind,
             const std::string& xcol, const std::string& ycol) {
    CsvTable t = read_csv_table(in);
    std::vector<double> xs, ys;
    int xi = xcol.empty() ? 0 : t.column(xcol);
    int yi = ycol.empty() ? (t.header.empty() ? 1 : static_cast<int>(t.header.size()) - 1)
                          : t.column(ycol);
    if (xi < 0 || yi < 0) throw std::runtime_error("plot: column not found");
    for (const auto& row : t.rows) {
        if (static_cast<int>(row.size()) <= std::max(xi, yi)) continue;
        xs.push_back(row[static_cast<size_t>(xi)]);
        ys.push_back(row[static_cast<size_t>(yi)]);
    }
    if (kind == "line")
        write_line_svg(xs, ys, out_path, std::filesystem::path(in).stem().string());
    else
        write_stem_svg(xs, ys, out_path, std::filesystem::path(in).stem().string());
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-periodic point sets under random displacements: generation, spectral estimation, recovery"};
    app.require_subcommand(1);

    CommonOpts gen_o, pert_o, spec_o, rec_o, ver_o, app_o;
    auto* gen = app.add_subcommand("generate", "generate a point set and its density trace");
    add_common(gen, gen_o);
    auto* pert = app.add_subcommand("perturb", "apply the displacement model and write both CSVs");
    add_common(pert, pert_o);
    auto* spec = app.add_subcommand("spectrum", "exponential sums and periodograms over the schedule");
    add_common(spec, spec_o);
    auto* rec = app.add_subcommand("recover", "measure, deconvolve and report recovered amplitudes");
    add_common(rec, rec_o);
    auto* ver = app.add_subcommand("verify", "run the config's analyses; exit 0 iff all pass");
    add_common(ver, ver_o);
    auto* apx = app.add_subcommand("appendix", "strong-law traces and the Hellinger bound");
    add_common(apx, app_o);

    std::string plot_in, plot_out, plot_kind = "stem", plot_x, plot_y;
    auto* plt = app.add_subcommand("plot", "render a CSV as a standalone SVG");
    plt->add_option("--in", plot_in, "input CSV")->required();
    plt->add_option("--out", plot_out, "output SVG")->required();
    plt->add_option("--kind", plot_kind, "stem or line");
    plt->add_option("--x", plot_x, "x column name (default: first)");
    plt->add_option("--y", plot_y, "y column name (default: last)");

    auto* pre = app.add_subcommand("presets", "list built-in configs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gen_o);
        if (pert->parsed()) return cmd_perturb(pert_o);
        if (spec->parsed())
            return run_and_report(with_analyses(load_config(spec_o), {"spectrum"}), spec_o.threads, false);
        if (rec->parsed())
            return run_and_report(with_analyses(load_config(rec_o), {"recover"}), rec_o.threads, false);
        if (ver->parsed()) return run_and_report(load_config(ver_o), ver_o.threads, true);
        if (apx->parsed()) {
            ExperimentConfig c = load_config(app_o);
            std::vector<std::string> keep;
            for (const std::string& a : c.analyses)
                if (a == "slln" || a == "hellinger") keep.push_back(a);
            if (keep.empty()) keep = {"slln"};
            return run_and_report(with_analyses(c, keep), app_o.threads, false);
        }
        if (plt->parsed()) return cmd_plot(plot_in, plot_out, plot_kind, plot_x, plot_y);
        if (pre->parsed()) {
            for (const auto& [name, _] : preset_configs()) std::printf("%s\n", name.c_str());
            return 0;
        }
    } catch (const config_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
