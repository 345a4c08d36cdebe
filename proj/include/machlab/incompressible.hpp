#pragma once

#include <vector>

#include "machlab/projection.hpp"

namespace machlab {

struct IncTrajectory {
    std::vector<double> times;
    std::vector<VectorField> fields;
};

/// Reference solver for the incompressible Euler equations via Leray
/// projection: dv/dt = -P(v.grad v), v.n = 0 on the walls.
class IncompressibleIntegrator {
  public:
    explicit IncompressibleIntegrator(GridPtr grid, bool dealias = true);

    VectorField step(const VectorField& v, double dt) const;
    IncTrajectory integrate(const VectorField& v0, double t_end, double cfl = 0.4,
                            int record_every = 1) const;

    const Projector& projector() const { return proj_; }

  private:
    GridPtr grid_;
    Projector proj_;
    bool dealias_;
};

double kinetic_energy(const VectorField& v);
double enstrophy(const VectorField& v);

}  // namespace machlab
