#pragma once

#include <string>
#include <utility>
#include <vector>

#include "machlab/projection.hpp"

namespace machlab {

/// Named node fields on one grid at one time: the on-disk snapshot unit.
/// Text header (kind, sizes, extents, time, epsilon, payload flag, field
/// names), then row-major values per field, either in decimal text or as raw
/// little-endian 64-bit floats.
struct Snapshot {
    GridPtr grid;
    double time = 0.0;
    double epsilon = 0.0;
    std::vector<std::pair<std::string, std::vector<double>>> fields;

    const std::vector<double>* find(const std::string& name) const;
};

void write_snapshot(const std::string& path, const Snapshot& snap, bool binary = false);
Snapshot read_snapshot(const std::string& path);

Snapshot to_snapshot(const State& s);
State state_from_snapshot(const Snapshot& snap);

/// timeseries.csv: time, l2_rho, l2_u, l2_uQ, l2_uP, mass, energy
/// (plus k_integral when with_k_integral is set, for the shallow-water runs).
void write_timeseries_csv(const std::string& path, const Trajectory& traj,
                          const Projector& proj, bool with_k_integral = false);

}  // namespace machlab
