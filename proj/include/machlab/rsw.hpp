#pragma once

#include <memory>
#include <vector>

#include "machlab/compressible.hpp"
#include "machlab/projection.hpp"

namespace machlab {
namespace rsw {

/// Height perturbation + velocity with the Froude number in the epsilon slot.
using RswState = State;

/// L U = (div u, grad rho + u_perp); K U = curl u - rho.
Pair apply_L(const Pair& p);
ScalarField apply_K(const Pair& p);
/// Formal adjoint of K against the weighted product, for traces vanishing on
/// the boundary: K* chi = (-chi, perp(grad chi))... with the sign convention
/// K*(chi) = (-chi, (d_y chi, -d_x chi)).
Pair apply_K_star(const ScalarField& chi);

enum class ProjectionMethod { elliptic, least_squares };

/// Slow/fast splitting for the rotating shallow water system. The slow range
/// is ker L = {(phi, perp grad phi)}; both methods run through one Dirichlet
/// factorization of the operator K K* = -Laplace + 1.
class Projector {
  public:
    explicit Projector(GridPtr grid);

    Pair project_P(const Pair& p, ProjectionMethod method = ProjectionMethod::elliptic) const;
    Pair project_Q(const Pair& p, ProjectionMethod method = ProjectionMethod::elliptic) const;
    Pair project_P(const State& s, ProjectionMethod method = ProjectionMethod::elliptic) const;
    Pair project_Q(const State& s, ProjectionMethod method = ProjectionMethod::elliptic) const;

    const GridPtr& grid() const { return grid_; }

  private:
    GridPtr grid_;
    EllipticSolver dirichlet_;  // (Laplace - 1) with zero trace
};

/// RK4 for d/dt (rho, u) = -(div(rho u), u.grad u) - (1/eps)(div u, grad rho + u_perp).
class Integrator {
  public:
    Integrator(GridPtr grid, const SolverConfig& config);

    State step(const State& s, double dt) const;
    Trajectory integrate(const State& initial) const;
    double stable_dt(const State& s) const;

  private:
    Pair rhs(const State& s, const ScalarField& rho, const VectorField& u) const;
    GridPtr grid_;
    SolverConfig config_;
    mutable double stage_mean_corr_ = 0.0;
    mutable double stage_wall_corr_ = 0.0;
};

/// || P (div(rho^Q u^Q), u^Q . grad u^Q) ||_L2 / ||U^Q||^2 (0 when U^Q = 0).
double fast_fast_residual(const State& s, const Projector& proj);

/// max_t | int K U(t) - int K U(0) |: the vorticity equation is in divergence
/// form, so the integral of K U is conserved by smooth dynamics.
double vorticity_budget(const Trajectory& traj);

/// Residuals of d/dt KU + div(flux) over the trajectory for two candidate
/// fluxes: .first uses u * KU (transport form), .second uses rho * u * KU
/// (the nearest vector reading of a scalar-valued flux). Centered differences
/// over interior snapshots, max L2.
std::pair<double, double> vorticity_flux_residuals(const Trajectory& traj);

}  // namespace rsw
}  // namespace machlab
