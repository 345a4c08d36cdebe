#include "machlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "machlab/errors.hpp"
#include "machlab/random_fields.hpp"
#include "machlab/snapshot.hpp"

namespace machlab {

namespace fs = std::filesystem;

GridPtr ExperimentConfig::make_grid_from() const {
    return make_grid(kind, n_periodic, n_wall, extent_a, extent_b, dealias_fraction);
}

SolverConfig ExperimentConfig::solver_config(double epsilon) const {
    SolverConfig sc;
    sc.cfl = cfl;
    sc.t_end = t_end;
    sc.dealias = dealias;
    sc.pressure = PressureLaw(gamma);
    sc.record_every = record_every > 0 ? record_every
                                       : auto_record_every(*this, make_grid_from(), epsilon);
    return sc;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config: bad numeric value '" + v + "' for key " + key);
    }
}

long parse_int(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config: bad integer value '" + v + "' for key " + key);
    }
}

bool parse_flag(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("config: bad flag value '" + v + "' for key " + key);
}

}  // namespace

IcPreset parse_preset(const std::string& name) {
    if (name == "ill_prepared_default") return IcPreset::ill_prepared_default;
    if (name == "well_prepared") return IcPreset::well_prepared;
    if (name == "acoustic_only") return IcPreset::acoustic_only;
    if (name == "annulus_harmonic") return IcPreset::annulus_harmonic;
    if (name == "rsw_geostrophic") return IcPreset::rsw_geostrophic;
    if (name == "rsw_ill_prepared") return IcPreset::rsw_ill_prepared;
    throw ConfigError("config: unknown ic_preset '" + name + "'");
}

const char* preset_name(IcPreset p) {
    switch (p) {
        case IcPreset::ill_prepared_default: return "ill_prepared_default";
        case IcPreset::well_prepared: return "well_prepared";
        case IcPreset::acoustic_only: return "acoustic_only";
        case IcPreset::annulus_harmonic: return "annulus_harmonic";
        case IcPreset::rsw_geostrophic: return "rsw_geostrophic";
        case IcPreset::rsw_ill_prepared: return "rsw_ill_prepared";
    }
    return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
    if (name == "strong") return ExperimentKind::strong;
    if (name == "weak") return ExperimentKind::weak;
    if (name == "fastslow") return ExperimentKind::fastslow;
    if (name == "slowres") return ExperimentKind::slowres;
    throw ConfigError("config: unknown experiment '" + name + "'");
}

const char* experiment_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::strong: return "strong";
        case ExperimentKind::weak: return "weak";
        case ExperimentKind::fastslow: return "fastslow";
        case ExperimentKind::slowres: return "slowres";
    }
    return "?";
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.epsilons.clear();
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            if (section != "grid" && section != "solver" && section != "experiment")
                throw ConfigError("config: unknown section [" + section + "] at line " +
                                  std::to_string(lineno));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (section == "grid") {
            if (key == "kind") {
                if (val == "channel") cfg.kind = DomainKind::channel;
                else if (val == "annulus") cfg.kind = DomainKind::annulus;
                else throw ConfigError("config: unknown kind '" + val + "'");
            } else if (key == "n_periodic") cfg.n_periodic = static_cast<int>(parse_int(val, key));
            else if (key == "n_wall") cfg.n_wall = static_cast<int>(parse_int(val, key));
            else if (key == "extent_a") cfg.extent_a = parse_double(val, key);
            else if (key == "extent_b") cfg.extent_b = parse_double(val, key);
            else if (key == "dealias_fraction") cfg.dealias_fraction = parse_double(val, key);
            else throw ConfigError("config: unknown key '" + key + "' in [grid]");
        } else if (section == "solver") {
            if (key == "gamma") cfg.gamma = parse_double(val, key);
            else if (key == "cfl") cfg.cfl = parse_double(val, key);
            else if (key == "t_end") cfg.t_end = parse_double(val, key);
            else if (key == "record_every") {
                cfg.record_every = (val == "auto") ? 0 : static_cast<int>(parse_int(val, key));
            } else if (key == "dealias") cfg.dealias = parse_flag(val, key);
            else throw ConfigError("config: unknown key '" + key + "' in [solver]");
        } else if (section == "experiment") {
            if (key == "epsilon") {
                std::stringstream ss(val);
                std::string item;
                while (std::getline(ss, item, ','))
                    cfg.epsilons.push_back(parse_double(trim(item), key));
            } else if (key == "ic_preset") cfg.preset = parse_preset(val);
            else if (key == "amplitude_slow") cfg.amplitude_slow = parse_double(val, key);
            else if (key == "amplitude_fast") cfg.amplitude_fast = parse_double(val, key);
            else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_int(val, key));
            else if (key == "output_dir") cfg.output_dir = val;
            else if (key == "workers") cfg.workers = static_cast<int>(parse_int(val, key));
            else if (key == "norm_order") cfg.norm_order = static_cast<int>(parse_int(val, key));
            else throw ConfigError("config: unknown key '" + key + "' in [experiment]");
        } else {
            throw ConfigError("config: key outside any section at line " + std::to_string(lineno));
        }
    }
    if (cfg.epsilons.empty()) throw ConfigError("config: epsilon list is empty");
    for (double e : cfg.epsilons)
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("config: epsilons must lie in (0, 1]");
    for (size_t i = 1; i < cfg.epsilons.size(); ++i)
        if (cfg.epsilons[i] >= cfg.epsilons[i - 1])
            throw ConfigError("config: epsilons must be strictly decreasing");
    if (cfg.amplitude_slow < 0.0 || cfg.amplitude_fast < 0.0)
        throw ConfigError("config: amplitudes must be nonnegative");
    if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_config(in);
}

std::string config_echo(const ExperimentConfig& cfg) {
    std::ostringstream out;
    char buf[64];
    out << "[grid]\n";
    out << "kind = " << (cfg.kind == DomainKind::channel ? "channel" : "annulus") << "\n";
    out << "n_periodic = " << cfg.n_periodic << "\n";
    out << "n_wall = " << cfg.n_wall << "\n";
    if (cfg.extent_a != kDefaultExtent) {
        std::snprintf(buf, sizeof buf, "%.17g", cfg.extent_a);
        out << "extent_a = " << buf << "\n";
    }
    if (cfg.extent_b != kDefaultExtent) {
        std::snprintf(buf, sizeof buf, "%.17g", cfg.extent_b);
        out << "extent_b = " << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "%.17g", cfg.dealias_fraction);
    out << "dealias_fraction = " << buf << "\n";
    out << "[solver]\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.gamma);
    out << "gamma = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.cfl);
    out << "cfl = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.t_end);
    out << "t_end = " << buf << "\n";
    if (cfg.record_every > 0) out << "record_every = " << cfg.record_every << "\n";
    else out << "record_every = auto\n";
    out << "dealias = " << (cfg.dealias ? "on" : "off") << "\n";
    out << "[experiment]\n";
    out << "epsilon = ";
    for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", cfg.epsilons[i]);
        out << (i ? "," : "") << buf;
    }
    out << "\n";
    out << "ic_preset = " << preset_name(cfg.preset) << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.amplitude_slow);
    out << "amplitude_slow = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.amplitude_fast);
    out << "amplitude_fast = " << buf << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "output_dir = " << cfg.output_dir << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "norm_order = " << cfg.norm_order << "\n";
    return out.str();
}

namespace {

double wall_arg(const Grid& g, int j) {
    return M_PI * (g.ys[j] - g.wall_a) / (g.wall_b - g.wall_a);
}

// slow stream function and acoustic density used by all channel presets
void preset_fields(const GridPtr& g, double amp_slow, double amp_fast, ScalarField& psi,
                   ScalarField& rho) {
    psi = ScalarField(g);
    rho = ScalarField(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) {
            const double x = g->xs[i], s = wall_arg(*g, j);
            psi(j, i) = amp_slow * std::sin(x) * std::sin(s);
            rho(j, i) = amp_fast * std::cos(x) * std::cos(s);
        }
}

}  // namespace

State make_initial_state(const ExperimentConfig& cfg, double epsilon) {
    GridPtr g = cfg.make_grid_from();
    State s(g, epsilon);
    ScalarField psi, rho;
    switch (cfg.preset) {
        case IcPreset::ill_prepared_default:
            preset_fields(g, cfg.amplitude_slow, cfg.amplitude_fast, psi, rho);
            s.u = perp(gradient(psi));
            s.rho = rho;
            break;
        case IcPreset::well_prepared:
            preset_fields(g, cfg.amplitude_slow, 0.0, psi, rho);
            s.u = perp(gradient(psi));
            break;
        case IcPreset::acoustic_only:
            preset_fields(g, 0.0, cfg.amplitude_fast, psi, rho);
            s.rho = rho;
            break;
        case IcPreset::annulus_harmonic: {
            if (cfg.kind != DomainKind::annulus)
                throw ConfigError("annulus_harmonic preset requires the annulus domain");
            auto basis = harmonic_basis(g);
            s.u = basis.at(0);
            scale(s.u, cfg.amplitude_slow);
            break;
        }
        case IcPreset::rsw_geostrophic:
        case IcPreset::rsw_ill_prepared:
            throw ConfigError("preset " + std::string(preset_name(cfg.preset)) +
                              " belongs to the rsw subcommand");
    }
    subtract_mean(s.rho);
    zero_wall_normal(s.u);
    try {
        validate_state(s);
    } catch (const VacuumError& e) {
        throw ConfigError(std::string("initial state breaches the vacuum floor: ") + e.what());
    }
    return s;
}

State make_rsw_initial_state(const ExperimentConfig& cfg, double epsilon) {
    GridPtr g = cfg.make_grid_from();
    State s(g, epsilon);
    ScalarField phi(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i)
            phi(j, i) = cfg.amplitude_slow * std::sin(g->xs[i]) * std::sin(wall_arg(*g, j));
    switch (cfg.preset) {
        case IcPreset::rsw_geostrophic:
            s.rho = phi;
            s.u = perp(gradient(phi));
            break;
        case IcPreset::rsw_ill_prepared: {
            s.rho = phi;
            s.u = perp(gradient(phi));
            for (int j = 0; j < g->ny; ++j)
                for (int i = 0; i < g->nx; ++i)
                    s.rho(j, i) += cfg.amplitude_fast * std::cos(g->xs[i]) *
                                   std::cos(wall_arg(*g, j));
            break;
        }
        default:
            throw ConfigError("preset " + std::string(preset_name(cfg.preset)) +
                              " is not a rotating-shallow-water preset");
    }
    subtract_mean(s.rho);
    zero_wall_normal(s.u);
    try {
        validate_state(s);
    } catch (const VacuumError& e) {
        throw ConfigError(std::string("initial state breaches the vacuum floor: ") + e.what());
    }
    return s;
}

int auto_record_every(const ExperimentConfig& cfg, const GridPtr& grid, double epsilon) {
    // snapshot interval eps/32 resolves the fundamental acoustic period with
    // ~45 samples and modes up to |k| ~ 5 with ~9 per period
    const double snapshot_dt = epsilon / 32.0;
    const double dt_est = cfg.cfl * grid->min_spacing() / (1.0 / epsilon + 1.0);
    return std::max(1, static_cast<int>(std::floor(snapshot_dt / dt_est)));
}

namespace {

struct PointOutcome {
    LadderPoint point;
    std::string timeseries_rel;  // relative artifact path, empty on failure
};

PointOutcome run_point(const ExperimentConfig& cfg, ExperimentKind kind, double eps,
                       const Projector& proj, const IncTrajectory* ref,
                       const PressureLaw& law) {
    PointOutcome out;
    out.point.epsilon = eps;
    State s0 = make_initial_state(cfg, eps);
    SolverConfig sc = cfg.solver_config(eps);
    CompressibleIntegrator integ(s0.grid(), sc);
    Trajectory traj = integ.integrate(s0);

    switch (kind) {
        case ExperimentKind::strong:
            out.point.error = strong_convergence_error(traj, *ref, cfg.norm_order, proj);
            break;
        case ExperimentKind::weak: {
            TestFunction test(TestFunction::Kind::qrange, s0.grid());
            WeakPairingResult r = weak_pairing(traj, test, proj);
            out.point.error = r.pairing;
            out.point.normalizer = r.normalizer;
            break;
        }
        case ExperimentKind::fastslow:
            out.point.error = fast_slow_average(traj, law, proj);
            break;
        case ExperimentKind::slowres: {
            auto [times, values] = slow_residual(traj, proj);
            out.point.error = *std::max_element(values.begin(), values.end());
            break;
        }
    }

    char name[64];
    std::snprintf(name, sizeof name, "eps_%g", eps);
    fs::create_directories(fs::path(cfg.output_dir) / name);
    const std::string rel = std::string(name) + "/timeseries.csv";
    write_timeseries_csv((fs::path(cfg.output_dir) / rel).string(), traj, proj);
    out.timeseries_rel = rel;
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, ExperimentKind kind, bool quiet) {
    if (cfg.preset == IcPreset::rsw_geostrophic || cfg.preset == IcPreset::rsw_ill_prepared)
        throw ConfigError("run_experiment: rsw presets run under the rsw subcommand");
    fs::create_directories(cfg.output_dir);

    GridPtr grid = cfg.make_grid_from();
    Projector proj(grid);
    PressureLaw law(cfg.gamma);

    // the incompressible reference depends only on the slow initial velocity,
    // which is epsilon-independent: integrate it once
    IncTrajectory ref;
    if (kind == ExperimentKind::strong) {
        State s0 = make_initial_state(cfg, cfg.epsilons.front());
        VectorField v0 = proj.project_Q(s0).slow.u;
        IncompressibleIntegrator inc(grid, cfg.dealias);
        ref = inc.integrate(v0, cfg.t_end, cfg.cfl, 1);
    }

    std::vector<PointOutcome> outcomes(cfg.epsilons.size());
    auto work = [&](size_t i) {
        try {
            outcomes[i] = run_point(cfg, kind, cfg.epsilons[i], proj, &ref, law);
        } catch (const std::exception& e) {
            outcomes[i].point.epsilon = cfg.epsilons[i];
            outcomes[i].point.status = std::string("failed: ") + e.what();
        }
    };
    if (cfg.workers <= 1) {
        for (size_t i = 0; i < cfg.epsilons.size(); ++i) work(i);
    } else {
        std::vector<std::future<void>> inflight;
        size_t next = 0;
        while (next < cfg.epsilons.size() || !inflight.empty()) {
            while (next < cfg.epsilons.size() &&
                   inflight.size() < static_cast<size_t>(cfg.workers))
                inflight.push_back(std::async(std::launch::async, work, next++));
            inflight.front().get();
            inflight.erase(inflight.begin());
        }
    }

    ExperimentResult result;
    std::vector<std::pair<double, double>> fit_points;
    for (size_t i = 0; i < outcomes.size(); ++i) {
        LadderPoint p = outcomes[i].point;
        if (p.status == "ok") {
            fit_points.emplace_back(p.epsilon, p.error / std::max(p.normalizer, 1e-300));
            if (fit_points.size() >= 3)
                p.slope_running = fit_rate(fit_points).fitted_slope;
            else
                p.slope_running = std::nan("");
        } else {
            p.slope_running = std::nan("");
        }
        result.points.push_back(p);
        if (!outcomes[i].timeseries_rel.empty()) result.artifacts.push_back(outcomes[i].timeseries_rel);
        if (!quiet)
            std::fprintf(stderr, "  eps %-8g %s\n", p.epsilon, p.status.c_str());
    }
    if (fit_points.size() < 3)
        throw NumericalError("run_experiment: fewer than 3 ladder points survived");
    result.report = fit_rate(fit_points);
    result.report.meta = experiment_name(kind);

    const std::string csv = (fs::path(cfg.output_dir) / "report.csv").string();
    const std::string svg = (fs::path(cfg.output_dir) / "report.svg").string();
    write_report_csv(csv, result.points);
    write_report_svg(svg, result.points, experiment_name(kind), result.report.fitted_slope);
    result.artifacts.push_back("report.csv");
    result.artifacts.push_back("report.svg");

    std::vector<ManifestEntry> manifest;
    manifest.push_back({"experiment", experiment_name(kind)});
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", result.report.fitted_slope);
    manifest.push_back({"fitted_slope", buf});
    std::snprintf(buf, sizeof buf, "%.6f", result.report.fit_residual);
    manifest.push_back({"fit_residual", buf});
    for (const LadderPoint& p : result.points) {
        std::snprintf(buf, sizeof buf, "point_eps_%g", p.epsilon);
        manifest.push_back({buf, p.status});
    }
    for (const std::string& rel : result.artifacts) {
        const std::string full = (fs::path(cfg.output_dir) / rel).string();
        manifest.push_back({"checksum " + rel, fnv1a64_file(full)});
    }
    std::istringstream echo(config_echo(cfg));
    std::string line;
    manifest.push_back({"config", "---"});
    while (std::getline(echo, line)) manifest.push_back({"  " + line, ""});
    write_manifest((fs::path(cfg.output_dir) / "manifest.txt").string(), manifest);
    return result;
}

bool check_invariants(const ExperimentConfig& cfg, std::ostream& log) {
    bool ok = true;
    auto report = [&](const char* name, double value, double threshold) {
        const bool pass = value <= threshold;
        ok = ok && pass;
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-44s %10.3e  (<= %.1e)  %s\n", name, value, threshold,
                      pass ? "ok" : "FAIL");
        log << buf;
    };

    for (DomainKind kind : {DomainKind::channel, DomainKind::annulus}) {
        GridPtr g = make_grid(kind, cfg.n_periodic, cfg.n_wall);
        log << (kind == DomainKind::channel ? "channel\n" : "annulus\n");
        Projector proj(g);
        rsw::Projector rproj(g);
        PressureLaw law(cfg.gamma);

        double idemP = 0.0, idemQ = 0.0, ortho = 0.0, comp = 0.0;
        double kq = 0.0, lp = 0.0, rsw_kq = 0.0, rsw_lp = 0.0, rsw_agree = 0.0, ff = 0.0;
        const int nstates = 10;
        for (int i = 0; i < nstates; ++i) {
            State s = random_band_limited_state(g, cfg.seed + 100 * i);
            s.epsilon = 0.1;
            State s2 = random_band_limited_state(g, cfg.seed + 100 * i + 50);
            const double ns = l2_norm(s.as_pair()), ns2 = l2_norm(s2.as_pair());

            Decomposition d = proj.project_Q(s);
            Pair pp = proj.project_P(d.slow);
            idemP = std::max(idemP, l2_norm(lincomb(1.0, pp, -1.0, d.slow)) / ns);
            Pair qq = proj.project_Q(d.fast).fast;
            idemQ = std::max(idemQ, l2_norm(lincomb(1.0, qq, -1.0, d.fast)) / ns);
            ortho = std::max(ortho,
                             std::abs(inner(d.slow, proj.project_Q(s2).fast)) / (ns * ns2));
            Pair sum = lincomb(1.0, d.slow, 1.0, d.fast);
            comp = std::max(comp, l2_norm(lincomb(1.0, sum, -1.0, s.as_pair())) / ns);
            kq = std::max(kq, l2_norm(curl2d(d.fast.u)) / ns);
            lp = std::max(lp, l2_norm(apply_L(d.slow)) / ns);

            Pair rq = rproj.project_Q(s);
            Pair rp = rproj.project_P(s);
            rsw_kq = std::max(rsw_kq, l2_norm(rsw::apply_K(rq)) / ns);
            rsw_lp = std::max(rsw_lp, l2_norm(rsw::apply_L(rp)) / ns);
            Pair rp2 = rproj.project_P(s, rsw::ProjectionMethod::least_squares);
            rsw_agree = std::max(rsw_agree, l2_norm(lincomb(1.0, rp, -1.0, rp2)) / ns);
            ff = std::max(ff, fast_fast_residual(s, law, proj));
        }
        report("P idempotence", idemP, 1e-8);
        report("Q idempotence", idemQ, 1e-8);
        report("P-Q orthogonality", ortho, 1e-8);
        report("P + Q complementarity", comp, 1e-10);
        report("curl of Q velocity", kq, 1e-8);
        report("L of the slow component", lp, 1e-8);
        report("rsw: K after Q", rsw_kq, 1e-8);
        report("rsw: L after P", rsw_lp, 1e-8);
        report("rsw: elliptic vs least-squares", rsw_agree, 1e-8);
        report("fast-fast cancellation", ff, 1e-6);

        const size_t hdim = harmonic_basis(g).size();
        const size_t want = (kind == DomainKind::annulus) ? 1 : 0;
        const bool hpass = hdim == want;
        ok = ok && hpass;
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-44s %10zu  (expect %zu)  %s\n", "harmonic dimension",
                      hdim, want, hpass ? "ok" : "FAIL");
        log << buf;
    }
    return ok;
}

}  // namespace machlab
