#include "machlab/compressible.hpp"

#include <algorithm>
#include <cmath>

#include "machlab/errors.hpp"

namespace machlab {

namespace {

void check_vacuum(const ScalarField& rho, double epsilon, const char* where) {
    double worst = 1e300;
    int worst_node = -1;
    for (size_t n = 0; n < rho.v.size(); ++n) {
        const double total = 1.0 + epsilon * rho.v[n];
        if (total < worst) {
            worst = total;
            worst_node = static_cast<int>(n);
        }
    }
    if (worst < 0.5)
        throw VacuumError(std::string(where) + ": vacuum breach, 1+eps*rho = " +
                              std::to_string(worst) + " at node " + std::to_string(worst_node),
                          worst_node, worst);
}

}  // namespace

ScalarField g_coeff(const ScalarField& rho, double epsilon, const PressureLaw& law) {
    check_vacuum(rho, epsilon, "g_coeff");
    const double a = law.gamma() - 2.0;
    ScalarField g(rho.grid);
    for (size_t n = 0; n < rho.v.size(); ++n) {
        const double s = epsilon * rho.v[n];
        if (std::abs(s) < 1e-6) {
            // (1+s)^a - 1 = a s (1 + (a-1)s/2 + (a-1)(a-2)s^2/6) + O(s^4)
            g.v[n] = a * rho.v[n] *
                     (1.0 + 0.5 * (a - 1.0) * s + (a - 1.0) * (a - 2.0) * s * s / 6.0);
        } else {
            g.v[n] = (std::pow(1.0 + s, a) - 1.0) / epsilon;
        }
    }
    return g;
}

Pair nonlinear_term(const Pair& u1, const Pair& u2, double epsilon, const PressureLaw& law,
                    bool dealias) {
    if (u1.grid().get() != u2.grid().get())
        throw ConfigError("nonlinear_term: operands live on different grids");
    Pair out(u1.grid());

    out.rho = advect_scalar(u1.u, u2.rho, dealias);
    ScalarField div2 = divergence(u2.u);
    ScalarField compress = dprod(u1.rho, div2, dealias);
    axpy(1.0, compress, out.rho);

    out.u = advect(u1.u, u2.u, dealias);
    ScalarField g = g_coeff(u1.rho, epsilon, law);
    VectorField grad2 = gradient(u2.rho);
    ScalarField gc1(u1.grid()), gc2(u1.grid());
    gc1.v = grad2.c1;
    gc2.v = grad2.c2;
    ScalarField p1 = dprod(g, gc1, dealias);
    ScalarField p2 = dprod(g, gc2, dealias);
    for (size_t n = 0; n < out.u.c1.size(); ++n) {
        out.u.c1[n] += p1.v[n];
        out.u.c2[n] += p2.v[n];
    }
    return out;
}

ScalarField rescale_to_V(const ScalarField& rho, double epsilon, const PressureLaw& law) {
    check_vacuum(rho, epsilon, "rescale_to_V");
    const double gam = law.gamma();
    ScalarField r(rho.grid);
    for (size_t n = 0; n < rho.v.size(); ++n) {
        const double s = epsilon * rho.v[n];
        if (std::abs(s) < 1e-6) {
            // p(1+s)/eps = rho (1 + (g-1)s/2 + (g-1)(g-2)s^2/6) + O(s^4)
            r.v[n] = rho.v[n] *
                     (1.0 + 0.5 * (gam - 1.0) * s + (gam - 1.0) * (gam - 2.0) * s * s / 6.0);
        } else {
            r.v[n] = law.p(1.0 + s) / epsilon;
        }
    }
    return r;
}

Pair rescale_to_V(const State& s, const PressureLaw& law) {
    Pair out;
    out.rho = rescale_to_V(s.rho, s.epsilon, law);
    out.u = s.u;
    return out;
}

ScalarField unscale_from_V(const ScalarField& r, double epsilon, const PressureLaw& law) {
    const double gam = law.gamma();
    const double b = 1.0 / gam;
    ScalarField rho(r.grid);
    for (size_t n = 0; n < r.v.size(); ++n) {
        const double t = gam * epsilon * r.v[n];
        if (std::abs(t) < 1e-6) {
            rho.v[n] = r.v[n] * (1.0 + 0.5 * (b - 1.0) * t + (b - 1.0) * (b - 2.0) * t * t / 6.0);
        } else {
            rho.v[n] = (law.p_inverse(epsilon * r.v[n]) - 1.0) / epsilon;
        }
    }
    return rho;
}

CompressibleIntegrator::CompressibleIntegrator(GridPtr grid, const SolverConfig& config)
    : grid_(std::move(grid)), config_(config) {
    if (!(config_.cfl > 0.0 && config_.cfl <= 1.0))
        throw ConfigError("SolverConfig: cfl must lie in (0, 1]");
    if (config_.record_every < 1) throw ConfigError("SolverConfig: record_every must be >= 1");
}

Pair CompressibleIntegrator::rhs(const State& s, const ScalarField& rho,
                                 const VectorField& u) const {
    Pair state_pair{rho, u};
    Pair lin = apply_L(state_pair);
    const double inv_eps = 1.0 / s.epsilon;
    Pair out(grid_);
    if (config_.nonlinear) {
        out = nonlinear_term(state_pair, state_pair, s.epsilon, config_.pressure,
                             config_.dealias);
        scale(out.rho, -1.0);
        scale(out.u, -1.0);
    }
    axpy(-inv_eps, lin.rho, out.rho);
    axpy(-inv_eps, lin.u, out.u);
    return out;
}

State CompressibleIntegrator::step(const State& s, double dt) const {
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    stage_mean_corr_ = 0.0;
    stage_wall_corr_ = 0.0;

    auto stage = [&](const ScalarField& rho0, const VectorField& u0, const Pair& k,
                     double c) -> std::pair<ScalarField, VectorField> {
        ScalarField rho = rho0;
        VectorField u = u0;
        axpy(c, k.rho, rho);
        axpy(c, k.u, u);
        const double m = mean(rho);
        stage_mean_corr_ = std::max(stage_mean_corr_, std::abs(m) * rho.grid->area);
        for (double& x : rho.v) x -= m;
        stage_wall_corr_ = std::max(stage_wall_corr_, zero_wall_normal(u));
        return {std::move(rho), std::move(u)};
    };

    const Pair k1 = rhs(s, s.rho, s.u);
    auto s2 = stage(s.rho, s.u, k1, 0.5 * dt);
    const Pair k2 = rhs(s, s2.first, s2.second);
    auto s3 = stage(s.rho, s.u, k2, 0.5 * dt);
    const Pair k3 = rhs(s, s3.first, s3.second);
    auto s4 = stage(s.rho, s.u, k3, dt);
    const Pair k4 = rhs(s, s4.first, s4.second);

    State out(grid_, s.epsilon, s.time + dt);
    out.rho = s.rho;
    out.u = s.u;
    axpy(dt / 6.0, k1.rho, out.rho);
    axpy(dt / 3.0, k2.rho, out.rho);
    axpy(dt / 3.0, k3.rho, out.rho);
    axpy(dt / 6.0, k4.rho, out.rho);
    axpy(dt / 6.0, k1.u, out.u);
    axpy(dt / 3.0, k2.u, out.u);
    axpy(dt / 3.0, k3.u, out.u);
    axpy(dt / 6.0, k4.u, out.u);

    const double m = mean(out.rho);
    stage_mean_corr_ = std::max(stage_mean_corr_, std::abs(m) * grid_->area);
    for (double& x : out.rho.v) x -= m;
    stage_wall_corr_ = std::max(stage_wall_corr_, zero_wall_normal(out.u));

    const double n0 = l2_norm(s.as_pair());
    const double n1 = l2_norm(out.as_pair());
    if (!std::isfinite(n1) || n1 > config_.blowup_factor * std::max(n0, 1e-30))
        throw BlowUpError("step: solution norm exploded at t = " + std::to_string(out.time),
                          out.time);
    return out;
}

double CompressibleIntegrator::stable_dt(const State& s) const {
    double cmax = 0.0, umax = 0.0;
    for (size_t n = 0; n < s.rho.v.size(); ++n) {
        cmax = std::max(cmax, config_.pressure.dp(1.0 + s.epsilon * s.rho.v[n]));
        const double sp = s.u.c1[n] * s.u.c1[n] + s.u.c2[n] * s.u.c2[n];
        umax = std::max(umax, sp);
    }
    cmax = std::sqrt(cmax);
    umax = std::sqrt(umax);
    return config_.cfl * grid_->min_spacing() / (cmax / s.epsilon + umax);
}

Trajectory CompressibleIntegrator::integrate(const State& initial) const {
    validate_state(initial);
    if (!(config_.t_end > 0.0)) throw ConfigError("integrate: t_end must be positive");
    if (config_.t_end > config_.t_end_guard)
        throw ConfigError("integrate: t_end exceeds the desk-scale guard");

    Trajectory traj;
    traj.epsilon = initial.epsilon;
    traj.config = config_;
    traj.states.push_back(initial);

    const double norm0 = l2_norm(initial.as_pair());
    State cur = initial;
    size_t since_record = 0;
    while (cur.time < config_.t_end - 1e-14) {
        double dt = stable_dt(cur);
        if (cur.time + dt > config_.t_end) dt = config_.t_end - cur.time;
        const double mass_before = std::abs(integral(cur.rho));
        cur = step(cur, dt);
        traj.max_mass_drift = std::max(traj.max_mass_drift, mass_before);
        traj.max_mean_correction = std::max(traj.max_mean_correction, stage_mean_corr_);
        traj.max_wall_correction = std::max(traj.max_wall_correction, stage_wall_corr_);
        ++traj.steps;
        ++since_record;

        const double norm = l2_norm(cur.as_pair());
        if (!std::isfinite(norm) || norm > config_.blowup_factor * std::max(norm0, 1e-30))
            throw BlowUpError("integrate: solution norm exploded at t = " +
                                  std::to_string(cur.time),
                              cur.time);
        if (since_record >= static_cast<size_t>(config_.record_every) ||
            cur.time >= config_.t_end - 1e-14) {
            traj.states.push_back(cur);
            since_record = 0;
        }
    }
    return traj;
}

}  // namespace machlab
