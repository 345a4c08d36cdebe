#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "machlab/diagnostics.hpp"
#include "machlab/report.hpp"
#include "machlab/rsw.hpp"

namespace machlab {

enum class IcPreset {
    ill_prepared_default,
    well_prepared,
    acoustic_only,
    annulus_harmonic,
    rsw_geostrophic,
    rsw_ill_prepared,
};

enum class ExperimentKind { strong, weak, fastslow, slowres };

struct ExperimentConfig {
    // [grid]
    DomainKind kind = DomainKind::channel;
    int n_periodic = 64;
    int n_wall = 33;
    double extent_a = kDefaultExtent;
    double extent_b = kDefaultExtent;
    double dealias_fraction = 2.0 / 3.0;
    // [solver]
    double gamma = 1.4;
    double cfl = 0.4;
    double t_end = 0.5;
    int record_every = 0;  // 0 = automatic snapshot density
    bool dealias = true;
    // [experiment]
    std::vector<double> epsilons;  // descending, in (0, 1]
    IcPreset preset = IcPreset::ill_prepared_default;
    double amplitude_slow = 1.0;
    double amplitude_fast = 0.5;
    uint64_t seed = 1;
    std::string output_dir = "out";
    int workers = 1;
    int norm_order = 0;

    GridPtr make_grid_from() const;
    SolverConfig solver_config(double epsilon) const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
/// Echo in the same sectioned key=value format (used by the manifest).
std::string config_echo(const ExperimentConfig& cfg);

IcPreset parse_preset(const std::string& name);
const char* preset_name(IcPreset p);
ExperimentKind parse_experiment(const std::string& name);
const char* experiment_name(ExperimentKind k);

/// Compressible presets (throws ConfigError for the rsw_* presets, and for a
/// vacuum-breaching amplitude/epsilon combination).
State make_initial_state(const ExperimentConfig& cfg, double epsilon);
/// Rotating-shallow-water presets.
State make_rsw_initial_state(const ExperimentConfig& cfg, double epsilon);

/// Snapshot stride keeping at least ~32 samples per acoustic period at the
/// given epsilon (never below 1); honored only when cfg.record_every == 0.
int auto_record_every(const ExperimentConfig& cfg, const GridPtr& grid, double epsilon);

struct ExperimentResult {
    ConvergenceReport report;
    std::vector<LadderPoint> points;
    std::vector<std::string> artifacts;  // files written, relative to output_dir
};

/// Runs the full epsilon ladder for one experiment and writes report.csv,
/// report.svg, per-point timeseries and a manifest under cfg.output_dir.
/// Failed ladder points are recorded; at least 3 survivors are required.
ExperimentResult run_experiment(const ExperimentConfig& cfg, ExperimentKind kind,
                                bool quiet = true);

/// Projection/operator identity battery on random band-limited states; prints
/// one line per check and returns true when all pass.
bool check_invariants(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace machlab
