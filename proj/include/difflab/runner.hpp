// runner.hpp
// Config-driven experiment pipeline: generators -> displacement model ->
// estimators -> CSV/JSON outputs plus a manifest. Output bytes depend only
// on (config, seeds), never on the thread count.
#pragma once

#include <chrono>
#include <filesystem>

#include "difflab/appendix.hpp"
#include "difflab/config.hpp"
#include "difflab/io.hpp"
#include "difflab/svg.hpp"
#include "difflab/version.hpp"

namespace difflab {

namespace detail {

inline std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

inline PerturbationModel with_seed(const PerturbationModel& model, uint64_t seed) {
    PerturbationModel m = model;
    m.seed = seed;
    return m;
}

inline PerturbedPointSet realize(const ExperimentConfig& c, const PointSet& base, uint64_t seed,
                                 double R) {
    if (c.model.kind == PerturbationModel::Kind::StationaryCP)
        return stationary_cp_field(c.model.scheme, c.model.dist, c.model.correlation_length, seed, R,
                                   c.model.force_zero_shift, c.generator.cap);
    return displace(base, with_seed(c.model, seed));
}

}  // namespace detail

class Runner {
public:
    Runner(ExperimentConfig config, int threads = 0)
        : cfg_(std::move(config)), threads_(resolve_threads(threads)) {}

    RunManifest run() {
        manifest_.config_hash = config_hash(cfg_.raw);
        manifest_.version = kVersion;
        manifest_.created_utc = detail::utc_now();
        std::filesystem::create_directories(cfg_.output_dir);

        const double Rmax = cfg_.r_schedule.back();
        const double margin = cfg_.has_model ? 10.0 * cfg_.model.dist.sigma_equivalent() : 0.0;
        base_ = cfg_.generator.generate(Rmax + margin);
        freqs_ = cfg_.frequencies.build(cfg_.generator);

        for (const std::string& analysis : cfg_.analyses) {
            bool ok = true;
            if (analysis == "spectrum") ok = run_spectrum();
            else if (analysis == "recover") ok = run_recover();
            else if (analysis == "gamma") ok = run_gamma();
            else if (analysis == "escape") ok = run_escape();
            else if (analysis == "strungaru") ok = run_strungaru();
            else if (analysis == "structure") ok = run_structure();
            else if (analysis == "hellinger") ok = run_hellinger();
            else if (analysis == "slln") ok = run_slln();
            manifest_.analysis_status.emplace_back(analysis, ok);
        }

        std::ofstream mf(cfg_.output_dir / "manifest.json");
        mf << manifest_.to_json().dump(2) << "\n";
        return manifest_;
    }

    const PointSet& base() const { return base_; }
    const FrequencySet& freqs() const { return freqs_; }

private:
    std::filesystem::path out(const std::string& name) {
        manifest_.outputs.push_back((cfg_.output_dir / name).string());
        return cfg_.output_dir / name;
    }

    double lag_radius() const {
        if (cfg_.lag_radius > 0) return cfg_.lag_radius;
        return std::min(cfg_.r_schedule.back() / 15.0, 10.0);
    }

    Vec probe_frequency() const {
        // first frequency of largest norm below the median: prefer a
        // nontrivial peak over lambda = 0
        Vec best(freqs_.dim);
        double bn = -1.0;
        for (const Vec& f : freqs_.freqs) {
            double n = f.norm();
            if (n > 1e-12 && (bn < 0 || n < bn)) {
                bn = n;
                best = f;
            }
        }
        if (bn < 0) throw config_error("config: analyses need at least one nonzero frequency");
        return best;
    }

    bool run_spectrum() {
        std::filesystem::path fpath = out("spectrum_base.csv");
        bool first = true;
        for (double R : cfg_.r_schedule) {
            auto rows = fourier_sum(base_, freqs_, R, threads_);
            auto pg = periodogram(base_, freqs_, R, threads_);
            rows.insert(rows.end(), pg.begin(), pg.end());
            write_spectral_csv(rows, base_.dim, fpath, !first);
            first = false;
        }
        if (cfg_.has_model && !cfg_.seeds.empty()) {
            std::filesystem::path ppath = out("spectrum_perturbed.csv");
            PerturbedPointSet pps = detail::realize(cfg_, base_, cfg_.seeds.front(), base_.generation_radius);
            first = true;
            for (double R : cfg_.r_schedule) {
                auto rows = fourier_sum(pps, freqs_, R, threads_);
                auto pg = periodogram(pps, freqs_, R, threads_);
                rows.insert(rows.end(), pg.begin(), pg.end());
                write_spectral_csv(rows, base_.dim, ppath, !first);
                first = false;
            }
        }
        if (cfg_.plot) plot_spectrum();
        return true;
    }

    void plot_spectrum() {
        const double R = cfg_.r_schedule.back();
        auto pg = periodogram(base_, freqs_, R, threads_);
        std::vector<double> xs, ys;
        for (const auto& e : pg) {
            xs.push_back(base_.dim == 1 ? e.frequency[0] : e.frequency.norm());
            ys.push_back(e.value.real());
        }
        write_stem_svg(xs, ys, out("spectrum.svg"), "power vs frequency");
    }

    bool run_recover() {
        const double R = cfg_.r_schedule.back();
        auto reference = fourier_sum(base_, freqs_, R, threads_);
        bool ok = true;
        std::vector<double> trace_x, trace_y;
        for (size_t si = 0; si < cfg_.seeds.size(); ++si) {
            uint64_t seed = cfg_.seeds[si];
            PerturbedPointSet pps = detail::realize(cfg_, base_, seed, base_.generation_radius);
            auto measured = fourier_sum(pps, freqs_, R, threads_);
            RecoveryReport rep = recover_spectrum(measured, pps.model, cfg_.cloak_threshold, &reference);
            if (si == 0) {
                write_recovery_json(rep, base_.dim, out("recovery.json"));
                // deviation trace across the schedule at the probe frequency
                Vec lam = probe_frequency();
                FrequencySet probe = FrequencySet::explicit_set(base_.dim, {lam});
                cplx phi = characteristic_function(pps.model, lam).value;
                cplx ref{0.0, 0.0};
                for (const auto& e : reference)
                    if ((e.frequency - lam).norm() < 1e-12) ref = e.value;
                for (double Rt : cfg_.r_schedule) {
                    double dev = std::abs(fourier_sum(pps, probe, Rt, threads_)[0].value - phi * ref);
                    trace_x.push_back(Rt);
                    trace_y.push_back(dev);
                }
                std::vector<std::pair<double, double>> rows;
                for (size_t i = 0; i < trace_x.size(); ++i) rows.emplace_back(trace_x[i], trace_y[i]);
                write_trace_csv(rows, out("recovery_trace.csv"), "R", "deviation");
                if (cfg_.plot) write_line_svg(trace_x, trace_y, out("recovery_trace.svg"), "deviation vs R");
            }
            bool seed_ok = true;
            const double abs_tol = cfg_.raw.value("recover_abs_tol", 0.05);
            const bool use_rel = cfg_.raw.contains("recover_rel_tol");
            const double rel_tol = cfg_.raw.value("recover_rel_tol", 0.02);
            for (const auto& e : rep.entries) {
                if (e.cloaked || !e.abs_error) continue;
                if (use_rel) {
                    double refmod = e.reference ? std::abs(*e.reference) : 0.0;
                    if (refmod > 0 && *e.abs_error / refmod > rel_tol) seed_ok = false;
                } else if (*e.abs_error > abs_tol) {
                    seed_ok = false;
                }
            }
            manifest_.seed_status.emplace_back(seed, seed_ok ? "ok" : "failed");
            ok = ok && seed_ok;
        }
        return ok;
    }

    bool run_gamma() {
        const double R = cfg_.r_schedule.back();
        const Vec lam = probe_frequency();
        PerturbedPointSet pps = detail::realize(cfg_, base_, cfg_.seeds.front(), base_.generation_radius);
        AutocorrEstimate ac = gamma_xi_lambda(pps, lam, lag_radius(), R);
        write_autocorr_csv(ac, out("gamma.csv"));
        const cplx* zero = ac.coefficient_at(Vec(base_.dim));
        if (!zero) return false;
        // compare against Var[exp(-2 pi i <xi,lambda>)] dens(X)
        double phi_abs2 = std::norm(characteristic_function(pps.model, lam).value);
        double dens = base_.claimed_density ? *base_.claimed_density
                                            : static_cast<double>(base_.size()) / ball_volume(base_.dim, base_.generation_radius);
        double target = (1.0 - phi_abs2) * dens;
        if (target <= 0) return true;
        return std::fabs(zero->real() - target) / target <= cfg_.raw.value("gamma_rel_tol", 0.05);
    }

    bool run_escape() {
        PerturbedPointSet pps = detail::realize(cfg_, base_, cfg_.seeds.front(), base_.generation_radius);
        std::vector<std::pair<double, double>> outs, ins;
        bool ok = true;
        double prev_out = std::numeric_limits<double>::infinity();
        for (double R : cfg_.r_schedule) {
            EscapeFractions ef = boundary_escape_fraction(pps, R);
            outs.emplace_back(R, ef.out_fraction);
            ins.emplace_back(R, ef.in_fraction);
            if (ef.out_fraction > prev_out) ok = false;
            prev_out = ef.out_fraction;
        }
        write_trace_csv(outs, out("escape_out.csv"), "R", "fraction");
        write_trace_csv(ins, out("escape_in.csv"), "R", "fraction");
        double cap = cfg_.raw.value("escape_max", 0.01);
        ok = ok && outs.back().second <= cap && ins.back().second <= cap;
        return ok;
    }

    bool run_strungaru() {
        const double R = cfg_.r_schedule.back();
        const Vec lam = probe_frequency();
        PerturbedPointSet pps = detail::realize(cfg_, base_, cfg_.seeds.front(), base_.generation_radius);
        AutocorrEstimate centered = gamma_xi_lambda(pps, lam, lag_radius(), R);
        PhaseMeasures pm = mu_lambda_weights(pps, lam);
        AutocorrEstimate control = autocorrelation(pm.plane_wave, lag_radius(), R);
        double stat = strungaru_statistic(centered);
        double stat_control = strungaru_statistic(control);
        const cplx* zero = centered.coefficient_at(Vec(base_.dim));
        const cplx* czero = control.coefficient_at(Vec(base_.dim));
        std::vector<std::pair<double, double>> rows = {
            {0.0, stat}, {1.0, zero ? zero->real() : 0.0}, {2.0, stat_control},
            {3.0, czero ? czero->real() : 0.0}};
        write_trace_csv(rows, out("strungaru.csv"), "row", "value");
        bool ok = zero && stat <= 0.05 * zero->real();
        ok = ok && czero && stat_control >= 0.5 * czero->real();
        return ok;
    }

    bool run_structure() {
        const double R = cfg_.r_schedule.back();
        PerturbationModel quiet = PerturbationModel::iid(Distribution::dirac0(base_.dim), 0);
        // exclude lambda = 0 (forward divergence)
        std::vector<Vec> nz;
        for (const Vec& f : freqs_.freqs)
            if (f.norm() > 1e-12) nz.push_back(f);
        FrequencySet fs = FrequencySet::explicit_set(base_.dim, nz, freqs_.provenance);
        StructureFactorEstimate sb = structure_factor(base_, quiet, fs, R, 10, threads_);
        write_structure_csv(sb, out("structure_base.csv"));
        if (!cfg_.has_model) return true;
        PerturbationModel model = detail::with_seed(cfg_.model, cfg_.seeds.front());
        StructureFactorEstimate sp = structure_factor(base_, model, fs, R, cfg_.n_realizations, threads_);
        write_structure_csv(sp, out("structure_perturbed.csv"));
        if (model.kind != PerturbationModel::Kind::IID) return true;
        RelationSummary rel = verify_structure_relation(sb, sp, model);
        std::vector<std::pair<double, double>> rows;
        for (const auto& r : rel.residuals) rows.emplace_back(r.lambda.norm(), r.residual);
        write_trace_csv(rows, out("structure_residuals.csv"), "lambda_norm", "residual");
        double se = 0;
        for (const auto& r : rel.residuals) se += r.combined_se;
        se /= std::max<size_t>(1, rel.residuals.size());
        return rel.mean_abs <= 3.0 * se;
    }

    bool run_hellinger() {
        const Vec lam = probe_frequency();
        FrequencyBump bump;
        bump.center = lam;
        bump.width = cfg_.bump_width;
        PerturbedPointSet pps = detail::realize(cfg_, base_, cfg_.seeds.front(), base_.generation_radius);
        DiffractionBoundResult res = hellinger_diffraction_bound(
            pps, lam, bump, cfg_.r_schedule, cfg_.grid_extent, cfg_.grid_step, threads_);
        std::vector<std::pair<double, double>> rows;
        for (size_t i = 0; i < res.radii.size(); ++i) rows.emplace_back(res.radii[i], res.lhs[i]);
        rows.emplace_back(0.0, res.rhs);
        write_trace_csv(rows, out("hellinger.csv"), "R_or_rhs", "value");
        // spread of the final lhs across the remaining seeds
        std::vector<double> tail = {res.lhs.back()};
        for (size_t si = 1; si < cfg_.seeds.size(); ++si) {
            PerturbedPointSet trial = detail::realize(cfg_, base_, cfg_.seeds[si], base_.generation_radius);
            DiffractionBoundResult r2 = hellinger_diffraction_bound(
                trial, lam, bump, {cfg_.r_schedule.back()}, cfg_.grid_extent, cfg_.grid_step, threads_);
            tail.push_back(r2.lhs.back());
        }
        MeanSE m = mean_se(tail);
        return res.lhs.back() <= res.rhs + 3.0 * (m.se > 0 ? m.se * std::sqrt(static_cast<double>(tail.size())) : 0.0) + 1e-12;
    }

    bool run_slln() {
        uint64_t seed = cfg_.seeds.empty() ? 0 : cfg_.seeds.front();
        auto centered = slln_trace(CorrelatedSequenceSpec::ar1(cfg_.ar_beta), cfg_.slln_n, seed);
        std::vector<std::pair<double, double>> rows;
        for (const auto& t : centered) rows.emplace_back(static_cast<double>(t.n), t.value);
        write_trace_csv(rows, out("slln.csv"));
        auto positive = truncated_slln_trace(
            CorrelatedSequenceSpec::iid(ScalarMarginal::exponential1()), cfg_.slln_n, seed);
        rows.clear();
        for (const auto& t : positive) rows.emplace_back(static_cast<double>(t.n), t.value);
        write_trace_csv(rows, out("slln_positive.csv"));
        if (cfg_.plot) {
            std::vector<double> xs, ys;
            for (const auto& t : centered) {
                xs.push_back(std::log10(static_cast<double>(t.n)));
                ys.push_back(std::fabs(t.value));
            }
            write_line_svg(xs, ys, out("slln.svg"), "centered mean vs log10 n");
        }
        return std::fabs(centered.back().value) <= 0.01 &&
               std::fabs(positive.back().value - 1.0) <= 0.01;
    }

    ExperimentConfig cfg_;
    int threads_;
    PointSet base_;
    FrequencySet freqs_;
    RunManifest manifest_;
};

inline RunManifest run_experiment(const ExperimentConfig& cfg, int threads = 0) {
    return Runner(cfg, threads).run();
}

}  // namespace difflab
