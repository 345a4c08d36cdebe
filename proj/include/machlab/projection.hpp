#pragma once

#include <memory>
#include <vector>

#include "machlab/elliptic.hpp"
#include "machlab/grid.hpp"
#include "machlab/ops.hpp"

namespace machlab {

/// A (density, velocity)-shaped value: decomposition halves, tendencies,
/// nonlinear terms. Carries no solution invariants of its own.
struct Pair {
    ScalarField rho;
    VectorField u;

    Pair() = default;
    explicit Pair(const GridPtr& g) : rho(g), u(g) {}
    Pair(ScalarField r, VectorField vel) : rho(std::move(r)), u(std::move(vel)) {}
    const GridPtr& grid() const { return rho.grid; }
};

/// Solution state: mean-zero density perturbation, wall-tangent velocity.
struct State {
    ScalarField rho;
    VectorField u;
    double epsilon = 1.0;
    double time = 0.0;

    State() = default;
    State(const GridPtr& g, double eps, double t = 0.0) : rho(g), u(g), epsilon(eps), time(t) {}
    const GridPtr& grid() const { return rho.grid; }
    Pair as_pair() const { return Pair{rho, u}; }
};

/// Checks the solution-space invariants: mean-zero density, wall tangency,
/// and the non-vacuum floor 1 + eps*rho >= 0.5. Throws on violation.
void validate_state(const State& s);

// weighted inner product and norms on pairs: <(r,u),(r',u')> = int r r' + u.u'
double inner(const Pair& a, const Pair& b);
double l2_norm(const Pair& a);
double sobolev_norm(const Pair& a, int s);
Pair lincomb(double a, const Pair& x, double b, const Pair& y);

struct Decomposition {
    Pair slow;                            // (0, u^P)
    Pair fast;                            // (rho, grad phi)
    ScalarField potential;                // phi
    std::vector<double> harmonic_coeffs;  // slow velocity against the harmonic basis
};

/// Helmholtz projections for the compressible Euler state. The acoustic
/// velocity is the weighted-L2-orthogonal projection of u onto gradients of
/// potentials whose normal derivative matches u.n at the walls (the discrete
/// realization of the Neumann problem div grad phi = div u); the slow part is
/// the complement. Orthogonality and idempotence hold to round-off by
/// construction.
class Projector {
  public:
    explicit Projector(GridPtr grid);
    ~Projector();
    Projector(const Projector&) = delete;
    Projector& operator=(const Projector&) = delete;

    Decomposition project_Q(const State& s) const;
    Decomposition project_Q(const Pair& p) const;
    Pair project_P(const State& s) const;
    Pair project_P(const Pair& p) const;

    /// Velocity-only Leray projection (the paper's restriction P-tilde);
    /// accepts fields with nonzero wall-normal advective flux.
    VectorField leray(const VectorField& a) const;

    /// ||QU||_H1 / ||L(QU)||_L2 with L U = (div u, grad rho).
    /// Returns +inf when QU vanishes.
    double verify_Q_bound(const State& s) const;

    const std::vector<VectorField>& harmonic() const { return harmonic_; }
    const GridPtr& grid() const { return grid_; }

  private:
    struct QSolver;
    GridPtr grid_;
    std::unique_ptr<QSolver> qsolver_;
    std::vector<VectorField> harmonic_;
};

/// L U = (div u, grad rho): the singular operator of the compressible system.
Pair apply_L(const Pair& p);

}  // namespace machlab
