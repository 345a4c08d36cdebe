#pragma once

#include <string>
#include <utility>
#include <vector>

#include "machlab/compressible.hpp"
#include "machlab/incompressible.hpp"
#include "machlab/projection.hpp"

namespace machlab {

struct ConvergenceReport {
    std::vector<double> epsilons;  // strictly decreasing
    std::vector<double> errors;
    double fitted_slope = 0.0;
    double fit_residual = 0.0;  // max deviation of log(error) from the fit line
    std::string meta;
    bool floored = false;  // some zero errors were clamped to 1e-15
};

/// Least-squares fit of log(error) against log(epsilon); needs >= 3 points.
ConvergenceReport fit_rate(const std::vector<std::pair<double, double>>& points);

/// || P N(U^Q, grad U^Q; eps) ||_L2 / ||U^Q||^2_H1, or 0 when U^Q vanishes.
double fast_fast_residual(const State& s, const PressureLaw& law, const Projector& proj);

/// || int_0^T [ P N(U^P, grad U^Q; 0) + P N(U^Q, grad U^P; 0) ] dt ||_L2 by
/// trapezoidal quadrature over >= 5 snapshots.
double fast_slow_average(const Trajectory& traj, const PressureLaw& law, const Projector& proj);

/// || -eps(t) ||_L2 with -eps(t) = u^P|_0^t + int_0^t P(u^P . grad u^P) ds;
/// exactly zero at the first snapshot.
std::pair<std::vector<double>, std::vector<double>> slow_residual(const Trajectory& traj,
                                                                  const Projector& proj);

/// max over snapshot times of || u^P(t) - v(t) ||_{H^s}, with the reference
/// velocity interpolated in time (cubic) to the snapshot times. s in {0,1,2}.
double strong_convergence_error(const Trajectory& traj, const IncTrajectory& ref, int s,
                                const Projector& proj);

/// Smooth closed-form space-time test functions for the weak pairing.
class TestFunction {
  public:
    enum class Kind { prange, qrange, generic, qrange_static };

    TestFunction(Kind kind, GridPtr grid);
    Pair eval(double t) const;
    Pair eval_dt(double t) const;
    Kind kind() const { return kind_; }
    static const char* name(Kind k);

  private:
    Kind kind_;
    GridPtr grid_;
    ScalarField chi_;   // potential for the gradient part
    ScalarField rhop_;  // density profile
    VectorField up_;    // solenoidal part
};

struct WeakPairingResult {
    double pairing = 0.0;     // | int int rho rho' + u^Q . u' |
    double normalizer = 0.0;  // ||U'||_{LinfL2} + ||dt U'||_{L2L2}
};

WeakPairingResult weak_pairing(const Trajectory& traj, const TestFunction& test,
                               const Projector& proj);

/// Discrete residual of the vorticity transport equation
/// d/dt w + u.grad w + w div u = 0 over interior collocation rows (centered
/// time differences); the singular 1/eps terms cancel identically, so the
/// residual tracks truncation only.
double vorticity_transport_residual(const Trajectory& traj);

}  // namespace machlab
