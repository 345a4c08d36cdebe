#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "machlab/errors.hpp"
#include "machlab/random_fields.hpp"
#include "machlab/rsw.hpp"

using namespace machlab;

namespace {

// geostrophic pair (phi, perp grad phi); phi zero-trace so P fixes it exactly
State geostrophic(const GridPtr& g, double eps, double amp = 0.3) {
    State s(g, eps);
    ScalarField phi(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i)
            phi(j, i) = amp * std::sin(g->xs[i]) * std::sin(g->ys[j]);
    s.rho = phi;
    subtract_mean(s.rho);
    s.u = perp(gradient(phi));
    zero_wall_normal(s.u);
    return s;
}

// Poincare channel mode with x-wavenumber k, wall quantization l = n pi / Ly,
// sigma^2 = 1 + k^2 + l^2 (frequencies sigma/eps in t units)
State poincare_mode(const GridPtr& g, double eps, int k, int n) {
    const double l = n * M_PI / (g->wall_b - g->wall_a);
    const double sigma = std::sqrt(1.0 + k * k + l * l);
    State s(g, eps);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) {
            const double x = g->xs[i], y = g->ys[j];
            const double sy = std::sin(l * y), cy = std::cos(l * y);
            s.u.c2[g->node(j, i)] = sy * std::cos(k * x);
            s.rho(j, i) = (sigma * l * cy - k * sy) / (sigma * sigma - k * k) * std::sin(k * x);
            s.u.c1[g->node(j, i)] =
                -(sigma * sy - k * l * cy) / (sigma * sigma - k * k) * std::sin(k * x);
        }
    subtract_mean(s.rho);
    zero_wall_normal(s.u);
    return s;
}

}  // namespace

TEST_CASE("kernel of L: u = perp grad rho balances rotation against the gradient") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    ScalarField rho = random_scalar_field(g, 3, 4, 0.7);
    Pair u{rho, perp(gradient(rho))};
    Pair lu = rsw::apply_L(u);
    CHECK(l2_norm(lu) <= 1e-10 * std::max(1.0, sobolev_norm(rho, 1)));
}

TEST_CASE("K on balanced states matches the symbolic oracle") {
    auto g = make_grid(DomainKind::channel, 32, 33);
    ScalarField rho(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i)
            rho(j, i) = std::cos(g->xs[i]) * std::cos(2.0 * g->ys[j]);
    // u = perp grad rho: K U = Lap rho - rho = (-1 - 4 - 1) rho = -6 rho
    Pair u{rho, perp(gradient(rho))};
    ScalarField k = rsw::apply_K(u);
    double err = 0.0;
    for (size_t n = 0; n < k.v.size(); ++n) err = std::max(err, std::abs(k.v[n] + 6.0 * rho.v[n]));
    CHECK(err <= 1e-9);

    // the reflected convention u = (d_y rho, -d_x rho) gives -Lap rho - rho
    VectorField refl = perp(gradient(rho));
    scale(refl, -1.0);
    ScalarField k2 = rsw::apply_K({rho, refl});
    double err2 = 0.0;
    for (size_t n = 0; n < k2.v.size(); ++n)
        err2 = std::max(err2, std::abs(k2.v[n] - 4.0 * rho.v[n]));
    CHECK(err2 <= 1e-9);  // -Lap rho - rho = (6 - 2) rho... = 4 rho for this mode
}

TEST_CASE("K annihilates the image of L") {
    for (DomainKind kind : {DomainKind::channel, DomainKind::annulus}) {
        auto g = make_grid(kind, 32, 17);
        State s = random_band_limited_state(g, 51);
        ScalarField kl = rsw::apply_K(rsw::apply_L(s.as_pair()));
        CHECK(l2_norm(kl) <= 1e-9 * std::max(1.0, sobolev_norm(s.as_pair(), 1)));
    }
}

TEST_CASE("states in ker K project to zero") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    rsw::Projector proj(g);
    VectorField u = random_solenoidal_field(g, 8, 4, 0.8);
    axpy(1.0, gradient(random_scalar_field(g, 9, 4, 0.4)), u);
    zero_wall_normal(u);
    Pair p{curl2d(u), u};  // rho := curl u makes K U = 0
    for (auto method : {rsw::ProjectionMethod::elliptic, rsw::ProjectionMethod::least_squares}) {
        Pair slow = proj.project_P(p, method);
        CHECK(l2_norm(slow) <= 1e-9 * std::max(1.0, l2_norm(p)));
    }
}

TEST_CASE("zero-trace geostrophic states are fixed points of P") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    rsw::Projector proj(g);
    State s = geostrophic(g, 0.1);
    Pair slow = proj.project_P(s);
    CHECK(l2_norm(lincomb(1.0, slow, -1.0, s.as_pair())) <= 1e-8 * l2_norm(s.as_pair()));
}

TEST_CASE("P is idempotent and the two formulas agree") {
    for (DomainKind kind : {DomainKind::channel, DomainKind::annulus}) {
        auto g = make_grid(kind, 48, 25);
        rsw::Projector proj(g);
        for (uint64_t seed : {61u, 62u, 63u}) {
            State s = random_band_limited_state(g, seed);
            Pair p1 = proj.project_P(s, rsw::ProjectionMethod::elliptic);
            Pair p2 = proj.project_P(s, rsw::ProjectionMethod::least_squares);
            const double ns = l2_norm(s.as_pair());
            CHECK(l2_norm(lincomb(1.0, p1, -1.0, p2)) <= 1e-8 * ns);
            Pair p11 = proj.project_P(p1);
            CHECK(l2_norm(lincomb(1.0, p11, -1.0, p1)) <= 1e-9 * ns);
        }
    }
}

TEST_CASE("duality relations hold discretely") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    rsw::Projector proj(g);
    for (uint64_t seed : {71u, 72u, 73u}) {
        State s = random_band_limited_state(g, seed);
        const double ns = l2_norm(s.as_pair());
        Pair fast = proj.project_Q(s);
        Pair slow = proj.project_P(s);
        CHECK(l2_norm(rsw::apply_K(fast)) <= 1e-8 * ns);
        CHECK(l2_norm(rsw::apply_L(slow)) <= 1e-8 * ns);
        CHECK(std::abs(inner(slow, proj.project_Q(random_band_limited_state(g, seed + 7)))) <=
              1e-8 * ns);
    }
}

TEST_CASE("K* is the discrete adjoint against zero-trace scalars") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    State s = random_band_limited_state(g, 81);
    ScalarField f(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) {
            const double x = g->xs[i], y = g->ys[j];
            f(j, i) = std::sin(y) * (0.7 * std::cos(x) + 0.4 * std::sin(2.0 * x)) +
                      0.5 * std::sin(2.0 * y);
        }
    const double a = inner(rsw::apply_K(s.as_pair()), f);
    const double b = inner(s.as_pair(), rsw::apply_K_star(f));
    CHECK(std::abs(a - b) <= 1e-9 * (std::abs(a) + std::abs(b) + 1.0));
}

TEST_CASE("zero state is an equilibrium") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    SolverConfig cfg;
    rsw::Integrator integ(g, cfg);
    State s(g, 0.1);
    CHECK(l2_norm(integ.step(s, 1e-3).as_pair()) == 0.0);
}

TEST_CASE("geostrophic states evolve slowly, uniformly in the Froude number") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    SolverConfig cfg;
    cfg.t_end = 0.25;
    cfg.record_every = 16;
    rsw::Projector proj(g);
    std::vector<double> rates;
    for (double eps : {0.2, 0.1, 0.05}) {
        State s0 = geostrophic(g, eps);
        cfg.record_every = std::max(1, static_cast<int>(16 * 0.2 / eps));
        rsw::Integrator integ(g, cfg);
        Trajectory traj = integ.integrate(s0);
        Pair p0 = proj.project_P(s0);
        const double norm0 = l2_norm(s0.as_pair());
        double cmax = 0.0;
        for (const State& s : traj.states) {
            if (s.time < 0.04) continue;
            const double drift = l2_norm(lincomb(1.0, proj.project_P(s), -1.0, p0));
            cmax = std::max(cmax, drift / (s.time * norm0 * norm0));
        }
        rates.push_back(cmax);
    }
    // the fitted rate must not grow as the Froude number shrinks
    CHECK(rates.back() <= 1.5 * rates.front() + 1e-9);
    CHECK(*std::max_element(rates.begin(), rates.end()) < 1.0);
}

TEST_CASE("inertia-gravity dispersion matches sqrt(1+|k|^2)/eps") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    const double eps = 0.1;
    const int k = 2, n = 1;
    const double l = n * M_PI / (g->wall_b - g->wall_a);
    const double omega_exact = std::sqrt(1.0 + k * k + l * l) / eps;

    SolverConfig cfg;
    cfg.nonlinear = false;
    cfg.record_every = 4;
    cfg.t_end = 5.0 * 2.0 * M_PI / omega_exact;
    rsw::Integrator integ(g, cfg);
    State s0 = poincare_mode(g, eps, k, n);
    Trajectory traj = integ.integrate(s0);

    std::vector<double> crossings;
    double pt = traj.states[0].time, pv = inner(traj.states[0].rho, s0.rho);
    for (size_t i = 1; i < traj.states.size(); ++i) {
        const double t = traj.states[i].time, v = inner(traj.states[i].rho, s0.rho);
        if (pv * v < 0.0) crossings.push_back(pt - pv * (t - pt) / (v - pv));
        pt = t;
        pv = v;
    }
    REQUIRE(crossings.size() >= 4);
    const double half = (crossings.back() - crossings.front()) / (crossings.size() - 1);
    const double omega = M_PI / half;
    CHECK(std::abs(omega - omega_exact) <= 0.01 * omega_exact);
}

TEST_CASE("fast-fast interaction cancels under P") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    rsw::Projector proj(g);
    for (uint64_t seed : {91u, 92u, 93u}) {
        State s = random_band_limited_state(g, seed);
        s.epsilon = 0.1;
        CHECK(rsw::fast_fast_residual(s, proj) <= 1e-6);
    }

    State z(g, 0.1);
    CHECK(rsw::fast_fast_residual(z, proj) == 0.0);

    // negative control: the same quadratic form on the raw (unprojected) state
    State s = random_band_limited_state(g, 94);
    Pair quad;
    quad.rho = advect_scalar(s.u, s.rho, true);
    ScalarField comp = dprod(s.rho, divergence(s.u), true);
    axpy(1.0, comp, quad.rho);
    quad.u = advect(s.u, s.u, true);
    const double nq = l2_norm(s.as_pair());
    CHECK(l2_norm(proj.project_P(quad)) / (nq * nq) >= 1e-2);
}

TEST_CASE("the integral of K U is conserved along smooth runs") {
    SolverConfig cfg;
    cfg.t_end = 0.5;
    cfg.record_every = 4;  // dense snapshots keep the centered d/dt sharp

    auto run = [&](int nx, int ny) {
        auto g = make_grid(DomainKind::channel, nx, ny);
        State s0 = geostrophic(g, 0.1, 0.25);
        ScalarField bump = random_scalar_field(g, 17, 2, 0.05);
        axpy(1.0, bump, s0.rho);
        subtract_mean(s0.rho);
        rsw::Integrator integ(g, cfg);
        return integ.integrate(s0);
    };

    Trajectory coarse = run(32, 17);
    Trajectory fine = run(64, 33);
    const double norm0 = l2_norm(coarse.states.front().as_pair());
    CHECK(rsw::vorticity_budget(fine) <= 1e-7 * norm0);
    CHECK(rsw::vorticity_budget(fine) <= 0.5 * rsw::vorticity_budget(coarse) + 1e-14);

    auto [res_u, res_rho] = rsw::vorticity_flux_residuals(fine);
    CHECK(res_u < 0.1 * res_rho);  // the transport form is the one satisfied

    // constant-in-time trajectory has zero budget
    Trajectory frozen;
    frozen.epsilon = 0.1;
    auto g = make_grid(DomainKind::channel, 32, 17);
    State s = geostrophic(g, 0.1);
    for (int i = 0; i < 3; ++i) {
        s.time = 0.1 * i;
        frozen.states.push_back(s);
    }
    CHECK(rsw::vorticity_budget(frozen) == 0.0);
}

TEST_CASE("mass and corrections stay pinned along rsw runs") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    SolverConfig cfg;
    cfg.t_end = 0.25;
    cfg.record_every = 16;
    State s0 = geostrophic(g, 0.1);
    rsw::Integrator integ(g, cfg);
    Trajectory traj = integ.integrate(s0);
    CHECK(traj.max_mass_drift <= 1e-9);
    for (const State& s : traj.states) CHECK(std::abs(integral(s.rho)) <= 1e-9);
}
