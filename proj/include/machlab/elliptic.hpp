#pragma once

#include <vector>

#include "machlab/grid.hpp"

namespace machlab {

enum class EllipticOperator { laplace, helmholtz_minus_one };
enum class BcKind { neumann, dirichlet };

/// Constant-coefficient boundary value problem on a Grid. bc_bottom/bc_top
/// hold one value per periodic node on the wall_a / wall_b boundary:
/// Dirichlet traces, or outward normal derivatives for Neumann.
struct EllipticProblem {
    EllipticOperator op = EllipticOperator::laplace;
    BcKind bc = BcKind::neumann;
    ScalarField rhs;
    std::vector<double> bc_bottom;
    std::vector<double> bc_top;
};

/// Direct solver: diagonalize in the periodic direction, one dense LU per
/// Fourier mode in the wall-normal direction. Factorizations are built once
/// and are immutable afterwards; solve() is safe to call concurrently.
class EllipticSolver {
  public:
    EllipticSolver(GridPtr grid, EllipticOperator op, BcKind bc);

    ScalarField solve(const ScalarField& rhs) const;
    ScalarField solve(const ScalarField& rhs, const std::vector<double>& bc_bottom,
                      const std::vector<double>& bc_top) const;

    const GridPtr& grid() const { return grid_; }

  private:
    GridPtr grid_;
    EllipticOperator op_;
    BcKind bc_;
    int nm_;
    std::vector<double> lu_;        // nm_ blocks of ny*ny LU factors
    std::vector<double> mat_;       // original matrices, for one refinement pass
    std::vector<int> piv_;          // nm_ blocks of ny pivots
    bool pinned_mode0_ = false;     // Neumann Laplace: mean row replaces one PDE row
    int pin_row_ = 0;
};

/// Checks Neumann/Laplace compatibility (throws CompatibilityError when the
/// defect exceeds 1e-10 relative), then solves.
ScalarField solve(const EllipticProblem& problem);

/// L2-orthonormal basis of {u : div u = 0, curl u = 0, u.n = 0 on walls},
/// excluding uniform translations. Empty on the channel; one field, tangent
/// with profile 1/r, on the annulus.
std::vector<VectorField> harmonic_basis(const GridPtr& grid);

}  // namespace machlab
