#pragma once

#include <vector>

#include "machlab/pressure.hpp"
#include "machlab/projection.hpp"

namespace machlab {

struct SolverConfig {
    double cfl = 0.4;
    double t_end = 0.5;
    bool dealias = true;
    PressureLaw pressure{1.4};
    int record_every = 1;
    bool nonlinear = true;        // linearized acoustics when false
    double blowup_factor = 1e6;   // abort when the norm grows past this
    double t_end_guard = 4.0;     // desk-scale horizon guard, configurable
};

struct Trajectory {
    std::vector<State> states;
    double epsilon = 0.0;
    SolverConfig config;
    size_t steps = 0;
    double max_mean_correction = 0.0;  // largest per-stage density recentering
    double max_wall_correction = 0.0;  // largest per-stage wall-normal zeroing
    double max_mass_drift = 0.0;       // |int rho| before recentering, per step
};

/// g(rho; eps) = (p'(1+eps rho)/(1+eps rho) - 1)/eps, with a series branch for
/// |eps rho| < 1e-6 (and for eps = 0 exactly). Throws VacuumError when
/// 1 + eps rho < 0.5 at any node.
ScalarField g_coeff(const ScalarField& rho, double epsilon, const PressureLaw& law);

/// N(U1, grad U2; eps) = (u1.grad rho2 + rho1 div u2,
///                        u1.grad u2 + g(rho1; eps) grad rho2)
Pair nonlinear_term(const Pair& u1, const Pair& u2, double epsilon, const PressureLaw& law,
                    bool dealias = true);

/// r = p(1 + eps rho)/eps pointwise (series branch near eps rho = 0).
ScalarField rescale_to_V(const ScalarField& rho, double epsilon, const PressureLaw& law);
Pair rescale_to_V(const State& s, const PressureLaw& law);
/// inverse map: rho from r
ScalarField unscale_from_V(const ScalarField& r, double epsilon, const PressureLaw& law);

/// Explicit RK4 integrator for
///   dU/dt = -N(U, grad U; eps) - (1/eps) L U.
/// Each stage recenters the density and zeroes the wall-normal velocity
/// nodally; the corrections are tracked and stay at truncation level for
/// smooth runs.
class CompressibleIntegrator {
  public:
    CompressibleIntegrator(GridPtr grid, const SolverConfig& config);

    State step(const State& s, double dt) const;
    Trajectory integrate(const State& initial) const;

    /// acoustic CFL: dt = cfl * dx_min / (c_max/eps + |u|_max)
    double stable_dt(const State& s) const;

    const SolverConfig& config() const { return config_; }

  private:
    Pair rhs(const State& s, const ScalarField& rho, const VectorField& u) const;
    GridPtr grid_;
    SolverConfig config_;
    mutable double stage_mean_corr_ = 0.0;
    mutable double stage_wall_corr_ = 0.0;
};

}  // namespace machlab
