#pragma once

#include <cstdint>

#include "machlab/projection.hpp"

namespace machlab {

/// Smooth seeded random fields, band-limited well below the dealias cutoff
/// (periodic modes <= max_mode, wall profiles sin/cos(m pi (y-a)/(b-a)) with
/// m <= max_mode and algebraically decaying amplitudes).
struct RandomStateOptions {
    int max_mode = 5;
    double amplitude = 0.5;      // resulting pair L2 norm
    double fast_fraction = 0.5;  // weight of the acoustic (gradient + density) part
    double decay = 2.0;
    bool include_harmonic = true;  // add a harmonic swirl component on the annulus
};

State random_band_limited_state(const GridPtr& grid, uint64_t seed,
                                const RandomStateOptions& opts = {});

/// Divergence-free, wall-tangent random velocity (a stream-function field).
VectorField random_solenoidal_field(const GridPtr& grid, uint64_t seed, int max_mode = 5,
                                    double amplitude = 1.0);

/// Mean-zero smooth random scalar.
ScalarField random_scalar_field(const GridPtr& grid, uint64_t seed, int max_mode = 5,
                                double amplitude = 1.0);

}  // namespace machlab
