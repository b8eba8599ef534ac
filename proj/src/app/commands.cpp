#include "dicke/app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace dicke::app {

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"spectrum", "floquet",  "husimi",
                                                   "nonmark",  "deltan",   "semiclassical"};
    return names;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

PointData compute_point(const ModelParams& p, const SpaceConfig& space, const RunConfig& cfg, const SpectralModel& s,
                        const Cache& cache) {
    const std::string key = point_key(p, space, cfg.floquet, s, cfg.force_driven);
    if (auto hit = cache.load(key)) return std::move(*hit);
    PointData d;
    d.basis = build_floquet_basis(p, space, cfg.floquet, cfg.force_driven);
    d.dissipator = assemble_dissipator(d.basis, build_coupling_channels(space), s);
    for (const auto& w : d.dissipator.warnings) spdlog::warn("g={} Omega={}: {}", p.g, p.drive_amplitude, w);
    cache.store(key, d);
    return d;
}

namespace {

std::string flag(bool b) { return b ? "1" : "0"; }

void require_single_point(const RunConfig& cfg, const std::string& cmd) {
    if (!cfg.sweep_key.empty()) throw ConfigError("key 'sweep_key': '" + cmd + "' takes a single parameter point");
}

CommandResult spectrum(const RunConfig& cfg) {
    CommandResult r;
    r.table = CsvTable({"g", "level_index", "energy"});
    const auto values = cfg.sweep_points();
    std::vector<Eigen::VectorXd> levels(values.size());
    const SpaceConfig space = cfg.space();
    parallel_for(values.size(), cfg.threads, [&](std::size_t i) {
        levels[i] = dicke::spectrum(build_dicke_hamiltonian(cfg.model_at(values[i]), space));
    });
    for (std::size_t i = 0; i < values.size(); ++i)
        for (Eigen::Index k = 0; k < levels[i].size(); ++k)
            r.table.add_row({fmt_real(cfg.model_at(values[i]).g), std::to_string(k), fmt_real(levels[i](k))});
    return r;
}

CommandResult floquet(const RunConfig& cfg, const Cache& cache) {
    CommandResult r;
    r.table = CsvTable({"g", "omega", "state_index", "quasienergy", "mean_energy", "steady_population"});
    const auto values = cfg.sweep_points();
    const SpaceConfig space = cfg.space();
    struct Out {
        ModelParams p;
        Eigen::VectorXd eps, mean, pss;
        double tail = 0;
    };
    std::vector<Out> out(values.size());
    parallel_for(values.size(), cfg.threads, [&](std::size_t i) {
        Out& o = out[i];
        o.p = cfg.model_at(values[i]);
        const PointData d = compute_point(o.p, space, cfg, cfg.spectral_at(values[i]), cache);
        o.eps = d.basis.energies;
        o.mean = d.basis.mean_energies();
        o.pss = steady_state(d.dissipator.rates);
        o.tail = d.dissipator.diagnostics.tail_fraction;
    });
    double worst_tail = 0;
    for (const auto& o : out) {
        worst_tail = std::max(worst_tail, o.tail);
        for (Eigen::Index k = 0; k < o.eps.size(); ++k)
            r.table.add_row({fmt_real(o.p.g), fmt_real(o.p.drive_amplitude), std::to_string(k), fmt_real(o.eps(k)),
                             fmt_real(o.mean(k)), fmt_real(o.pss(k))});
    }
    r.meta.notes.emplace_back("max_fourier_tail_fraction", fmt_real(worst_tail));
    return r;
}

CommandResult husimi_cmd(const RunConfig& cfg, const Cache& cache) {
    require_single_point(cfg, "husimi");
    CommandResult r;
    r.table = CsvTable({"re_alpha", "im_alpha", "Q", "trunc_ok"});
    const SpaceConfig space = cfg.space();
    const PointData d = compute_point(cfg.model, space, cfg, cfg.spectral, cache);
    const Eigen::VectorXd pss = steady_state(d.dissipator.rates);
    const CavityState cav = stationary_cavity_state(d.basis, pss, space, d.dissipator.coherence);
    for (const auto& w : cav.warnings) spdlog::warn("{}", w);
    const HusimiField field = husimi(cav.rho.matrix(), cfg.husimi);
    int unhealthy = 0;
    for (int i = 0; i < cfg.husimi.n_re; ++i)
        for (int j = 0; j < cfg.husimi.n_im; ++j) {
            r.table.add_row({fmt_real(cfg.husimi.re_at(i)), fmt_real(cfg.husimi.im_at(j)), fmt_real(field.q(i, j)),
                             flag(field.trunc_ok(i, j))});
            unhealthy += field.trunc_ok(i, j) ? 0 : 1;
        }
    if (unhealthy > 0)
        spdlog::warn("{} grid points lie outside |alpha|^2 <= photon_cutoff / 2 (trunc_ok = 0)", unhealthy);
    const auto modes = detect_modes(field);
    std::string where;
    for (const auto& m : modes) where += fmt::format("{}({}, {})", where.empty() ? "" : " ", m.re, m.im);
    double mean_n = 0;
    for (Eigen::Index n = 0; n < cav.rho.dim(); ++n) mean_n += static_cast<double>(n) * cav.rho.matrix()(n, n).real();
    r.meta.notes = {{"modes", std::to_string(modes.size())},
                    {"mode_locations", where},
                    {"normalization", fmt_real(field.normalization())},
                    {"mean_photon_number", fmt_real(mean_n)},
                    {"top_fock_population", fmt_real(cav.rho.matrix()(cav.rho.dim() - 1, cav.rho.dim() - 1).real())},
                    {"points_outside_truncation_bound", std::to_string(unhealthy)}};
    return r;
}

struct NonMarkPoint {
    ModelParams p;
    MaximizationResult best;
    double grid_delta = 0;
    double horizon = 0;
    bool converged = true;
};

NonMarkPoint nonmark_point(const ModelParams& p, const SpectralModel& s, const RunConfig& cfg, const Cache& cache) {
    const SpaceConfig space = cfg.space();
    const PointData d = compute_point(p, space, cfg, s, cache);
    const NonMarkovEvaluator ev(d.basis, space, d.dissipator, cfg.grid, p.omega0);
    NonMarkPoint out{p, maximize_nonmarkovianity(ev, cfg.n_samples, cfg.seed, cfg.pair_kind)};
    const NonMarkovResult canonical = ev.evaluate(canonical_pair(p.n_emitters));
    out.grid_delta = canonical.grid_delta;
    out.horizon = ev.horizon();
    for (const auto& smp : out.best.samples) out.converged = out.converged && smp.converged;
    return out;
}

CommandResult nonmark(const RunConfig& cfg, const Cache& cache) {
    CommandResult r;
    r.table = CsvTable({"g", "omega", "N_value", "pair_kind", "seed", "converged"});
    const auto values = cfg.sweep_points();
    std::vector<NonMarkPoint> pts(values.size());
    parallel_for(values.size(), cfg.threads,
                 [&](std::size_t i) { pts[i] = nonmark_point(cfg.model_at(values[i]), cfg.spectral_at(values[i]), cfg, cache); });
    bool all_converged = true;
    double worst_grid = 0;
    for (const auto& pt : pts) {
        for (const auto& s : pt.best.samples)
            r.table.add_row({fmt_real(pt.p.g), fmt_real(pt.p.drive_amplitude), fmt_real(s.value), to_string(s.kind),
                             std::to_string(s.seed), flag(s.converged)});
        if (!pt.converged) {
            spdlog::error("g={} Omega={}: trace-distance increments still present in the last 10% of the horizon "
                          "({} time units); raise t_max_factor or max_periods",
                          pt.p.g, pt.p.drive_amplitude, pt.horizon);
            all_converged = false;
        }
        worst_grid = std::max(worst_grid, pt.grid_delta);
    }
    r.meta.notes.emplace_back("max_canonical_grid_halving_delta", fmt_real(worst_grid));
    if (cfg.model.n_emitters > 2) r.meta.notes.emplace_back("canonical_pair", "extrapolated beyond N = 2");
    r.exit_code = all_converged ? kSuccess : kConvergenceFailure;
    return r;
}

CommandResult deltan(const RunConfig& cfg, const Cache& cache) {
    if (!(cfg.sweep_key.empty() || cfg.sweep_key == "g"))
        throw ConfigError("key 'sweep_key': 'deltan' sweeps g only");
    if (!(cfg.model.drive_amplitude > 0))
        throw ConfigError("key 'drive_amplitude': 'deltan' needs a positive drive amplitude");
    CommandResult r;
    r.table = CsvTable({"g", "delta_N"});
    auto values = cfg.sweep_points();
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    // Index 2i is the driven setup of values[i], 2i + 1 the matched undriven one.
    std::vector<NonMarkPoint> pts(2 * values.size());
    parallel_for(pts.size(), cfg.threads, [&](std::size_t k) {
        ModelParams p = cfg.model_at(values[k / 2]);
        if (k % 2 == 1) p.drive_amplitude = 0.0;
        pts[k] = nonmark_point(p, cfg.spectral, cfg, cache);
    });
    bool all_converged = true;
    std::string noise;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& on = pts[2 * i];
        const auto& off = pts[2 * i + 1];
        r.table.add_row({fmt_real(values[i]), fmt_real(delta_n(on.best, off.best))});
        all_converged = all_converged && on.converged && off.converged;
        noise += (noise.empty() ? "" : " ") + fmt_real(on.grid_delta + off.grid_delta);
    }
    r.meta.notes.emplace_back("g_order", "ascending");
    r.meta.notes.emplace_back("grid_halving_noise", noise);
    r.exit_code = all_converged ? kSuccess : kConvergenceFailure;
    return r;
}

semiclassical::State initial_state(const RunConfig& cfg, const semiclassical::Params& p) {
    const auto n = static_cast<std::size_t>(p.n_emitters);
    const auto& sc = cfg.semiclassical;
    semiclassical::State s;
    s.alpha = {sc.alpha0_re, sc.alpha0_im};
    if (sc.initial == "branch") {
        const double c = sc.branch_c < 0 ? static_cast<double>(p.n_emitters) * p.n_emitters : sc.branch_c;
        std::optional<semiclassical::State> b;
        try {
            b = semiclassical::branch_state(c, p);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("key 'sc_branch_c': ") + e.what());
        }
        if (!b) throw ConfigError("key 'sc_initial': no alpha = 0 branch exists (bimodal regime)");
        b->alpha = s.alpha;
        return *b;
    }
    s.beta.assign(n, cplx{});
    s.zeta.assign(n, sc.initial == "excited" ? 1.0 : -1.0);
    return s;
}

CommandResult semiclassical_cmd(const RunConfig& cfg) {
    require_single_point(cfg, "semiclassical");
    const semiclassical::Params p = cfg.semiclassical_params();
    std::vector<std::string> header = {"t", "re_alpha", "im_alpha"};
    for (int j = 1; j <= p.n_emitters; ++j) header.push_back(fmt::format("beta_re_{}", j));
    for (int j = 1; j <= p.n_emitters; ++j) header.push_back(fmt::format("zeta_{}", j));
    header.emplace_back("C");
    CommandResult r;
    r.table = CsvTable(header);
    const double period = cfg.model.drive_period();
    const double dt = period / cfg.semiclassical.steps_per_period;
    const auto traj = semiclassical::integrate(initial_state(cfg, p), p, cfg.semiclassical.periods * period, dt,
                                               cfg.semiclassical.sample_every);
    for (const auto& smp : traj.samples) {
        std::vector<std::string> row = {fmt_real(smp.t), fmt_real(smp.state.alpha.real()),
                                        fmt_real(smp.state.alpha.imag())};
        for (const auto& b : smp.state.beta) row.push_back(fmt_real(b.real()));
        for (double z : smp.state.zeta) row.push_back(fmt_real(z));
        row.push_back(fmt_real(smp.state.total_pseudospin()));
        r.table.add_row(std::move(row));
    }
    const double c0 = traj.samples.front().state.total_pseudospin();
    r.meta.notes = {{"max_length_drift", fmt_real(traj.max_length_drift)},
                    {"max_total_drift", fmt_real(traj.max_total_drift)},
                    {"critical_amplitude", fmt_real(semiclassical::critical_amplitude(c0, p.g))},
                    {"kappa", fmt_real(p.kappa)}};
    return r;
}

}  // namespace

CommandResult run_command(const std::string& name, const RunConfig& cfg) {
    const Cache cache(cfg.cache_dir);
    CommandResult r;
    if (name == "spectrum") r = spectrum(cfg);
    else if (name == "floquet") r = floquet(cfg, cache);
    else if (name == "husimi") r = husimi_cmd(cfg, cache);
    else if (name == "nonmark") r = nonmark(cfg, cache);
    else if (name == "deltan") r = deltan(cfg, cache);
    else if (name == "semiclassical") r = semiclassical_cmd(cfg);
    else throw ConfigError("unknown subcommand '" + name + "'");
    r.meta.command = name;
    r.csv = write_result(cfg.output_dir, name, r.table, cfg, r.meta);
    spdlog::info("wrote {} ({} rows)", r.csv.string(), r.table.rows());
    return r;
}

}  // namespace dicke::app
