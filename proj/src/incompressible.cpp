#include "machlab/incompressible.hpp"

#include <cmath>

#include "machlab/errors.hpp"

namespace machlab {

IncompressibleIntegrator::IncompressibleIntegrator(GridPtr grid, bool dealias)
    : grid_(grid), proj_(grid), dealias_(dealias) {}

VectorField IncompressibleIntegrator::step(const VectorField& v, double dt) const {
    if (v.grid.get() != grid_.get()) throw ConfigError("inc step: grid mismatch");
    auto deriv = [&](const VectorField& w) {
        VectorField a = proj_.leray(advect(w, w, dealias_));
        scale(a, -1.0);
        return a;
    };
    auto stage = [&](const VectorField& base, const VectorField& k, double c) {
        VectorField w = lincomb(1.0, base, c, k);
        zero_wall_normal(w);
        return w;
    };

    const VectorField k1 = deriv(v);
    const VectorField k2 = deriv(stage(v, k1, 0.5 * dt));
    const VectorField k3 = deriv(stage(v, k2, 0.5 * dt));
    const VectorField k4 = deriv(stage(v, k3, dt));

    VectorField out = v;
    axpy(dt / 6.0, k1, out);
    axpy(dt / 3.0, k2, out);
    axpy(dt / 3.0, k3, out);
    axpy(dt / 6.0, k4, out);
    out = proj_.leray(out);  // keep divergence and wall data at round-off
    zero_wall_normal(out);
    return out;
}

IncTrajectory IncompressibleIntegrator::integrate(const VectorField& v0, double t_end,
                                                  double cfl, int record_every) const {
    if (!(t_end > 0.0)) throw ConfigError("inc integrate: t_end must be positive");
    if (record_every < 1) throw ConfigError("inc integrate: record_every must be >= 1");

    IncTrajectory traj;
    traj.times.push_back(0.0);
    traj.fields.push_back(v0);

    const double norm0 = l2_norm(v0);
    VectorField cur = v0;
    double t = 0.0;
    int since = 0;
    while (t < t_end - 1e-14) {
        double umax = 0.0;
        for (size_t n = 0; n < cur.c1.size(); ++n)
            umax = std::max(umax, cur.c1[n] * cur.c1[n] + cur.c2[n] * cur.c2[n]);
        umax = std::sqrt(umax);
        double dt = cfl * grid_->min_spacing() / std::max(umax, 1e-8);
        dt = std::min(dt, 0.05 * t_end);  // resolve the slow dynamics even at rest
        if (t + dt > t_end) dt = t_end - t;
        cur = step(cur, dt);
        t += dt;
        ++since;
        const double norm = l2_norm(cur);
        if (!std::isfinite(norm) || norm > 1e6 * std::max(norm0, 1e-30))
            throw BlowUpError("inc integrate: velocity norm exploded at t = " + std::to_string(t), t);
        if (since >= record_every || t >= t_end - 1e-14) {
            traj.times.push_back(t);
            traj.fields.push_back(cur);
            since = 0;
        }
    }
    return traj;
}

double kinetic_energy(const VectorField& v) { return 0.5 * inner(v, v); }

double enstrophy(const VectorField& v) {
    ScalarField w = curl2d(v);
    return 0.5 * inner(w, w);
}

}  // namespace machlab
