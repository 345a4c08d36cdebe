// machlab: batch laboratory for the low-Mach compressible Euler system and
// its rotating shallow water sibling. Subcommands:
//   simulate        compressible run -> snapshots + timeseries.csv
//   simulate-inc    incompressible reference run
//   rsw             rotating shallow water run (adds the k_integral column)
//   decompose       slow/fast splitting of one snapshot file
//   ladder          epsilon-ladder convergence experiment -> report.csv/.svg
//   check-invariants  projection/operator identity battery
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
//             4 threshold failure (ladder --assert, check-invariants).

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "machlab/errors.hpp"
#include "machlab/harness.hpp"
#include "machlab/incompressible.hpp"
#include "machlab/snapshot.hpp"

namespace fs = std::filesystem;
using namespace machlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitThreshold = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int workers = 0;
    bool quiet = false;
};

ExperimentConfig load(const CommonOpts& opts) {
    ExperimentConfig cfg = parse_config_file(opts.config_path);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.workers > 0) cfg.workers = opts.workers;
    return cfg;
}

void write_state_snapshots(const std::string& dir, const Trajectory& traj) {
    fs::create_directories(dir);
    char name[64];
    for (size_t i = 0; i < traj.states.size(); ++i) {
        std::snprintf(name, sizeof name, "snap_%05zu.dat", i);
        write_snapshot((fs::path(dir) / name).string(), to_snapshot(traj.states[i]));
    }
}

int cmd_simulate(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    if (cfg.epsilons.size() != 1)
        throw ConfigError("simulate: exactly one epsilon expected (use ladder for lists)");
    const double eps = cfg.epsilons[0];
    State s0 = make_initial_state(cfg, eps);
    CompressibleIntegrator integ(s0.grid(), cfg.solver_config(eps));
    Trajectory traj = integ.integrate(s0);
    Projector proj(s0.grid());
    fs::create_directories(cfg.output_dir);
    write_timeseries_csv((fs::path(cfg.output_dir) / "timeseries.csv").string(), traj, proj);
    write_state_snapshots((fs::path(cfg.output_dir) / "snapshots").string(), traj);
    if (!opts.quiet)
        std::printf("simulate: %zu steps, %zu snapshots, max corrections (mean %.2e, wall %.2e)\n",
                    traj.steps, traj.states.size(), traj.max_mean_correction,
                    traj.max_wall_correction);
    return kExitOk;
}

int cmd_simulate_inc(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    GridPtr grid = cfg.make_grid_from();
    Projector proj(grid);
    State s0 = make_initial_state(cfg, cfg.epsilons[0]);
    VectorField v0 = proj.project_Q(s0).slow.u;
    IncompressibleIntegrator inc(grid, cfg.dealias);
    const int rec = cfg.record_every > 0 ? cfg.record_every : 1;
    IncTrajectory ref = inc.integrate(v0, cfg.t_end, cfg.cfl, rec);

    // share the state snapshot and CSV formats (density identically zero)
    Trajectory traj;
    traj.epsilon = cfg.epsilons[0];
    for (size_t i = 0; i < ref.times.size(); ++i) {
        State s(grid, cfg.epsilons[0], ref.times[i]);
        s.u = ref.fields[i];
        traj.states.push_back(std::move(s));
    }
    fs::create_directories(cfg.output_dir);
    write_timeseries_csv((fs::path(cfg.output_dir) / "timeseries.csv").string(), traj, proj);
    write_state_snapshots((fs::path(cfg.output_dir) / "snapshots").string(), traj);
    if (!opts.quiet)
        std::printf("simulate-inc: %zu snapshots, energy drift %.3e\n", traj.states.size(),
                    std::abs(kinetic_energy(ref.fields.back()) - kinetic_energy(ref.fields[0])));
    return kExitOk;
}

int cmd_rsw(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    if (cfg.epsilons.size() != 1) throw ConfigError("rsw: exactly one epsilon expected");
    const double eps = cfg.epsilons[0];
    State s0 = make_rsw_initial_state(cfg, eps);
    rsw::Integrator integ(s0.grid(), cfg.solver_config(eps));
    Trajectory traj = integ.integrate(s0);
    Projector proj(s0.grid());
    fs::create_directories(cfg.output_dir);
    write_timeseries_csv((fs::path(cfg.output_dir) / "timeseries.csv").string(), traj, proj,
                         /*with_k_integral=*/true);
    write_state_snapshots((fs::path(cfg.output_dir) / "snapshots").string(), traj);
    const double budget = rsw::vorticity_budget(traj);
    auto [res_u, res_rho] = rsw::vorticity_flux_residuals(traj);
    if (!opts.quiet) {
        std::printf("rsw: %zu steps, K-integral drift %.3e\n", traj.steps, budget);
        std::printf("rsw: vorticity flux residuals: transport u*KU %.3e, rho*u*KU %.3e -> %s\n",
                    res_u, res_rho, res_u <= res_rho ? "transport form satisfied" : "unexpected");
    }
    return kExitOk;
}

int cmd_decompose(const std::string& snapshot_path, const std::string& out_prefix, bool quiet) {
    Snapshot snap = read_snapshot(snapshot_path);
    State s = state_from_snapshot(snap);
    Projector proj(s.grid());
    Decomposition d = proj.project_Q(s.as_pair());

    Snapshot slow;
    slow.grid = s.grid();
    slow.time = s.time;
    slow.epsilon = s.epsilon;
    slow.fields.emplace_back("rho", d.slow.rho.v);
    slow.fields.emplace_back("u1", d.slow.u.c1);
    slow.fields.emplace_back("u2", d.slow.u.c2);
    write_snapshot(out_prefix + "_slow.dat", slow);

    Snapshot fast = slow;
    fast.fields.clear();
    fast.fields.emplace_back("rho", d.fast.rho.v);
    fast.fields.emplace_back("u1", d.fast.u.c1);
    fast.fields.emplace_back("u2", d.fast.u.c2);
    write_snapshot(out_prefix + "_fast.dat", fast);

    Snapshot pot = slow;
    pot.fields.clear();
    pot.fields.emplace_back("phi", d.potential.v);
    write_snapshot(out_prefix + "_potential.dat", pot);

    if (!quiet) {
        std::printf("decompose: |u_P| %.6e |u_Q| %.6e |rho| %.6e |phi| %.6e", l2_norm(d.slow.u),
                    l2_norm(d.fast.u), l2_norm(d.fast.rho), l2_norm(d.potential));
        for (double c : d.harmonic_coeffs) std::printf(" harmonic %.6e", c);
        std::printf("\n");
    }
    return kExitOk;
}

int cmd_ladder(const CommonOpts& opts, const std::string& experiment, bool assert_thresholds) {
    ExperimentConfig cfg = load(opts);
    ExperimentKind kind = parse_experiment(experiment);
    if (cfg.epsilons.size() < 3) throw ConfigError("ladder: need at least 3 epsilons");
    ExperimentResult result = run_experiment(cfg, kind, opts.quiet);
    if (!opts.quiet) {
        std::printf("ladder %s: slope %.4f, fit residual %.4f\n", experiment.c_str(),
                    result.report.fitted_slope, result.report.fit_residual);
        for (const LadderPoint& p : result.points)
            std::printf("  eps %-9g error %.6e normalizer %.6e [%s]\n", p.epsilon, p.error,
                        p.normalizer, p.status.c_str());
    }
    if (assert_thresholds) {
        if (!(result.report.fitted_slope >= 0.8 && result.report.fit_residual <= 0.3)) {
            std::fprintf(stderr, "ladder: threshold failure (slope %.4f, residual %.4f)\n",
                         result.report.fitted_slope, result.report.fit_residual);
            return kExitThreshold;
        }
    }
    return kExitOk;
}

int cmd_check_invariants(const CommonOpts& opts) {
    ExperimentConfig cfg = load(opts);
    const bool ok = check_invariants(cfg, std::cout);
    std::printf("check-invariants: %s\n", ok ? "all ok" : "FAILURES");
    return ok ? kExitOk : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"machlab: low-Mach Euler / rotating shallow water laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string experiment = "strong", snapshot_path, out_prefix = "decomposed";
    bool assert_thresholds = false;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* c = sub->add_option("--config", opts.config_path, "sectioned key=value config file");
        if (needs_config) c->required();
        sub->add_option("--out", opts.out_dir, "output directory (overrides output_dir)");
        sub->add_option("--workers", opts.workers, "concurrent ladder points");
        sub->add_flag("--quiet", opts.quiet, "suppress progress output");
    };

    CLI::App* sim = app.add_subcommand("simulate", "compressible Euler run");
    add_common(sim);
    CLI::App* sinc = app.add_subcommand("simulate-inc", "incompressible reference run");
    add_common(sinc);
    CLI::App* srsw = app.add_subcommand("rsw", "rotating shallow water run");
    add_common(srsw);
    CLI::App* dec = app.add_subcommand("decompose", "slow/fast splitting of a snapshot");
    dec->add_option("snapshot", snapshot_path, "snapshot file")->required();
    dec->add_option("--out", out_prefix, "output prefix");
    dec->add_flag("--quiet", opts.quiet);
    CLI::App* lad = app.add_subcommand("ladder", "epsilon-ladder experiment");
    add_common(lad);
    lad->add_option("--experiment", experiment, "strong|weak|fastslow|slowres");
    lad->add_flag("--assert", assert_thresholds, "exit 4 unless slope >= 0.8 and residual <= 0.3");
    CLI::App* chk = app.add_subcommand("check-invariants", "projection identity battery");
    add_common(chk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(opts);
        if (sinc->parsed()) return cmd_simulate_inc(opts);
        if (srsw->parsed()) return cmd_rsw(opts);
        if (dec->parsed()) return cmd_decompose(snapshot_path, out_prefix, opts.quiet);
        if (lad->parsed()) return cmd_ladder(opts, experiment, assert_thresholds);
        if (chk->parsed()) return cmd_check_invariants(opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
