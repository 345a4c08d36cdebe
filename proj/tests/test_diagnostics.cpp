#include <cmath>

#include "doctest.h"
#include "machlab/diagnostics.hpp"
#include "machlab/errors.hpp"
#include "machlab/random_fields.hpp"

using namespace machlab;

namespace {

State ill_prepared(const GridPtr& g, double eps, double amp_slow = 1.0, double amp_fast = 0.5) {
    State s(g, eps);
    ScalarField psi(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) {
            psi(j, i) = amp_slow * std::sin(g->xs[i]) * std::sin(g->ys[j]);
            s.rho(j, i) = amp_fast * std::cos(g->xs[i]) * std::cos(g->ys[j]);
        }
    s.u = perp(gradient(psi));
    zero_wall_normal(s.u);
    subtract_mean(s.rho);
    return s;
}

Trajectory run(const GridPtr& g, double eps, double t_end, int record_every, double amp_fast = 0.5) {
    SolverConfig cfg;
    cfg.t_end = t_end;
    cfg.record_every = record_every;
    CompressibleIntegrator integ(g, cfg);
    return integ.integrate(ill_prepared(g, eps, 1.0, amp_fast));
}

}  // namespace

TEST_CASE("rate fit recovers exact slopes") {
    ConvergenceReport r1 = fit_rate({{0.2, 0.02}, {0.1, 0.01}, {0.05, 0.005}});
    CHECK(r1.fitted_slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r1.fit_residual <= 1e-12);

    ConvergenceReport r2 = fit_rate({{0.2, 0.04}, {0.1, 0.01}, {0.05, 0.0025}});
    CHECK(r2.fitted_slope == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit_rate({{0.2, 0.1}, {0.1, 0.05}}), ConfigError);
    CHECK_THROWS_AS(fit_rate({{0.1, 0.1}, {0.2, 0.05}, {0.05, 0.01}}), ConfigError);

    ConvergenceReport r3 = fit_rate({{0.2, 0.02}, {0.1, 0.0}, {0.05, 0.005}});
    CHECK(r3.floored);
}

TEST_CASE("fast-fast interaction vanishes under P, and only for fast input") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    Projector proj(g);
    PressureLaw law(1.4);
    for (uint64_t seed = 0; seed < 5; ++seed) {
        State s = random_band_limited_state(g, 200 + seed);
        s.epsilon = 0.1;
        CHECK(fast_fast_residual(s, law, proj) <= 1e-6);
    }

    // state in the slow range has no fast part at all
    State slow(g, 0.1);
    slow.u = random_solenoidal_field(g, 3, 4, 1.0);
    CHECK(fast_fast_residual(slow, law, proj) == 0.0);

    // negative control: the same quadratic form on a generic slow state
    State s(g, 0.1);
    ScalarField psi(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) {
            const double x = g->xs[i], y = g->ys[j];
            psi(j, i) = std::sin(x) * std::sin(y) + 0.6 * std::sin(2.0 * x + 0.3) * std::sin(y);
        }
    s.u = perp(gradient(psi));
    zero_wall_normal(s.u);
    Pair slow_pair{ScalarField(g), s.u};
    Pair quad = nonlinear_term(slow_pair, slow_pair, 0.0, law, true);
    const double h1 = sobolev_norm(slow_pair, 1);
    CHECK(l2_norm(proj.project_P(quad)) / (h1 * h1) >= 1e-2);
}

TEST_CASE("time-average diagnostics demand enough snapshots") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    Projector proj(g);
    PressureLaw law(1.4);
    Trajectory traj;
    traj.epsilon = 0.1;
    State s = ill_prepared(g, 0.1);
    traj.states.assign(3, s);
    CHECK_THROWS_AS(fast_slow_average(traj, law, proj), ConfigError);
    CHECK_THROWS_AS(slow_residual(traj, proj), ConfigError);
}

TEST_CASE("slow residual starts at exactly zero and stays small") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    Projector proj(g);
    Trajectory traj = run(g, 0.1, 0.2, 8);
    auto [times, values] = slow_residual(traj, proj);
    REQUIRE(times.size() == traj.states.size());
    CHECK(values.front() == 0.0);
    for (double v : values) CHECK(v < 1.0);
}

TEST_CASE("weak pairing is orthogonality-exact against the slow range") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    Projector proj(g);
    Trajectory traj = run(g, 0.1, 0.2, 8);
    TestFunction prange(TestFunction::Kind::prange, g);
    WeakPairingResult r = weak_pairing(traj, prange, proj);
    CHECK(r.pairing <= 1e-8 * r.normalizer);

    TestFunction qrange(TestFunction::Kind::qrange, g);
    WeakPairingResult rq = weak_pairing(traj, qrange, proj);
    CHECK(rq.normalizer > 0.0);
    CHECK(std::isfinite(rq.pairing));
}

TEST_CASE("test-function presets land in the advertised ranges") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    Projector proj(g);
    TestFunction prange(TestFunction::Kind::prange, g);
    Pair p = prange.eval(0.37);
    CHECK(l2_norm(proj.project_Q(p).fast) <= 1e-9 * l2_norm(p));

    TestFunction qrange(TestFunction::Kind::qrange, g);
    Pair q = qrange.eval(0.37);
    CHECK(l2_norm(proj.project_P(q)) <= 1e-8 * l2_norm(q));

    // finite-difference check of the closed-form time derivative
    TestFunction gen(TestFunction::Kind::generic, g);
    const double h = 1e-5;
    Pair fd = lincomb(0.5 / h, gen.eval(0.2 + h), -0.5 / h, gen.eval(0.2 - h));
    Pair an = gen.eval_dt(0.2);
    CHECK(l2_norm(lincomb(1.0, fd, -1.0, an)) <= 1e-8 * std::max(1.0, l2_norm(an)));
}

TEST_CASE("strong convergence error vanishes for identical trajectories") {
    auto g = make_grid(DomainKind::channel, 64, 33);
    Projector proj(g);

    // build an inc trajectory and a fake compressible trajectory holding the
    // same velocities with zero density
    IncompressibleIntegrator inc(g);
    VectorField v0 = random_solenoidal_field(g, 23, 3, 0.8);
    IncTrajectory ref = inc.integrate(v0, 0.3, 0.4, 1);

    Trajectory traj;
    traj.epsilon = 0.1;
    for (size_t i = 0; i < ref.times.size(); i += 4) {
        State s(g, 0.1, ref.times[i]);
        s.u = ref.fields[i];
        traj.states.push_back(s);
    }
    CHECK(strong_convergence_error(traj, ref, 0, proj) <= 1e-9);

    auto g2 = make_grid(DomainKind::channel, 32, 17);
    Projector proj2(g2);
    Trajectory bad;
    bad.epsilon = 0.1;
    bad.states.push_back(State(g2, 0.1));
    CHECK_THROWS_AS(strong_convergence_error(bad, ref, 0, proj2), ConfigError);
    CHECK_THROWS_AS(strong_convergence_error(traj, ref, 3, proj), ConfigError);
}

TEST_CASE("strong convergence measurement is discretization-converged") {
    // same epsilon, refined grid: the measured slow-versus-reference error
    // moves by less than 20 percent
    const double eps = 0.1;
    double errs[2];
    int idx = 0;
    for (int n : {64, 96}) {
        auto g = make_grid(DomainKind::channel, n, (n == 64) ? 33 : 49);
        Projector proj(g);
        Trajectory traj = run(g, eps, 0.5, 8);
        IncompressibleIntegrator inc(g);
        VectorField v0 = proj.project_Q(traj.states.front()).slow.u;
        IncTrajectory ref = inc.integrate(v0, 0.5, 0.4, 1);
        errs[idx++] = strong_convergence_error(traj, ref, 0, proj);
    }
    CHECK(std::abs(errs[1] - errs[0]) <= 0.2 * errs[0]);
}

TEST_CASE("vorticity transport holds without any singular contribution") {
    // residual at two resolutions: truncation-limited, not 1/eps-limited
    const double eps = 0.05;
    double res[2];
    double scale_1eps = 0.0;
    int idx = 0;
    for (int n : {32, 64}) {
        auto g = make_grid(DomainKind::channel, n, (n == 32) ? 17 : 33);
        Trajectory traj = run(g, eps, 0.25, 4, 0.3);
        res[idx++] = vorticity_transport_residual(traj);
        if (n == 64) {
            const State& mid = traj.states[traj.states.size() / 2];
            scale_1eps = l2_norm(divergence(mid.u)) / eps;
        }
    }
    CHECK(res[0] <= 10.0 * res[1]);
    CHECK(res[1] <= 0.01 * scale_1eps);  // nothing singular in the budget
}
