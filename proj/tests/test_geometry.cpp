#include <cmath>

#include "doctest.h"
#include "machlab/errors.hpp"
#include "machlab/grid.hpp"
#include "machlab/ops.hpp"

using namespace machlab;

namespace {

ScalarField fill(const GridPtr& g, double (*fn)(double, double)) {
    ScalarField f(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) f(j, i) = fn(g->xs[i], g->ys[j]);
    return f;
}

}  // namespace

TEST_CASE("quadrature reproduces |Omega|") {
    auto channel = make_grid(DomainKind::channel, 32, 17);
    ScalarField one(channel);
    for (double& v : one.v) v = 1.0;
    CHECK(integral(one) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-13));
    CHECK(channel->area == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-13));

    auto ann = make_grid(DomainKind::annulus, 32, 17, 1.0, 2.0);
    ScalarField one_a(ann);
    for (double& v : one_a.v) v = 1.0;
    CHECK(integral(one_a) == doctest::Approx(3.0 * M_PI).epsilon(1e-11));
}

TEST_CASE("invalid extents and resolutions are configuration errors") {
    CHECK_THROWS_AS(make_grid(DomainKind::annulus, 32, 17, 2.0, 1.0), ConfigError);
    CHECK_THROWS_AS(make_grid(DomainKind::channel, 32, 17, -1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(make_grid(DomainKind::channel, 4, 17), ConfigError);
    CHECK_THROWS_AS(make_grid(DomainKind::channel, 32, 16), ConfigError);
}

TEST_CASE("trigonometric integrands below the cutoff integrate exactly") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    // int (1/2 + cos 2x)(1 + sin y) over [0,2pi)x[0,pi] = pi^2 + 2pi
    ScalarField f = fill(g, [](double x, double y) {
        return (0.5 + std::cos(2.0 * x)) * (1.0 + std::sin(y));
    });
    const double exact = M_PI * M_PI + 2.0 * M_PI;
    CHECK(std::abs(integral(f) - exact) <= 1e-12 * std::abs(exact));
}

TEST_CASE("gradient of cos x cos y is spectrally exact") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    ScalarField f = fill(g, [](double x, double y) { return std::cos(x) * std::cos(y); });
    VectorField grad = gradient(f);
    double err = 0.0;
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) {
            const double x = g->xs[i], y = g->ys[j];
            err = std::max(err, std::abs(grad.c1[g->node(j, i)] + std::sin(x) * std::cos(y)));
            err = std::max(err, std::abs(grad.c2[g->node(j, i)] + std::cos(x) * std::sin(y)));
        }
    CHECK(err <= 1e-10);
}

TEST_CASE("divergence of gradient matches the Laplacian") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    ScalarField f = fill(g, [](double x, double y) { return std::cos(x) * std::cos(y); });
    ScalarField lap = divergence(gradient(f));
    double err = 0.0;
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i)
            err = std::max(err, std::abs(lap(j, i) + 2.0 * std::cos(g->xs[i]) * std::cos(g->ys[j])));
    CHECK(err <= 1e-9);
}

TEST_CASE("curl of a gradient vanishes discretely") {
    for (DomainKind kind : {DomainKind::channel, DomainKind::annulus}) {
        auto g = make_grid(kind, 32, 17);
        ScalarField f(g);
        for (int j = 0; j < g->ny; ++j)
            for (int i = 0; i < g->nx; ++i) {
                const double x = g->xs[i], y = g->ys[j];
                f(j, i) = std::sin(2.0 * x) * std::cos(y) + 0.3 * std::cos(3.0 * x + 0.4) * y * y;
            }
        ScalarField k = curl2d(gradient(f));
        CHECK(l2_norm(k) <= 1e-10 * std::max(1.0, sobolev_norm(f, 1)));
    }
}

TEST_CASE("divergence of perp gradient vanishes discretely") {
    auto g = make_grid(DomainKind::annulus, 32, 17);
    ScalarField f = fill(g, [](double x, double y) { return std::sin(x) * (y - 1.0) * (2.0 - y); });
    ScalarField d = divergence(perp(gradient(f)));
    CHECK(l2_norm(d) <= 1e-10 * std::max(1.0, sobolev_norm(f, 1)));
}

TEST_CASE("integration by parts against wall-tangent fields") {
    for (DomainKind kind : {DomainKind::channel, DomainKind::annulus}) {
        auto g = make_grid(kind, 32, 17);
        ScalarField f(g);
        VectorField v(g);
        const double a = g->wall_a, b = g->wall_b;
        for (int j = 0; j < g->ny; ++j)
            for (int i = 0; i < g->nx; ++i) {
                const double x = g->xs[i], y = g->ys[j];
                const double s = (y - a) * (b - y);  // vanishes at both walls
                f(j, i) = std::cos(2.0 * x) * (0.5 + y) + 0.7 * std::sin(x) * y * y;
                // wall-normal component proportional to s, tangential free
                if (kind == DomainKind::channel) {
                    v.c1[g->node(j, i)] = std::sin(x) * (1.0 + 0.3 * y);
                    v.c2[g->node(j, i)] = std::cos(x) * s;
                } else {
                    v.c1[g->node(j, i)] = std::cos(x) * s;
                    v.c2[g->node(j, i)] = std::sin(x) * (1.0 + 0.3 * y);
                }
            }
        const double lhs = inner(gradient(f), v);
        const double rhs = -inner(f, divergence(v));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + std::abs(rhs) + 1.0));
    }
}

TEST_CASE("sobolev norm basics") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    ScalarField c(g);
    for (double& v : c.v) v = 3.0;
    CHECK(sobolev_norm(c, 0) == doctest::Approx(3.0 * std::sqrt(2.0 * M_PI * M_PI)).epsilon(1e-12));

    ScalarField sx = fill(g, [](double x, double) { return std::sin(x); });
    CHECK(sobolev_norm(sx, 0) == doctest::Approx(M_PI).epsilon(1e-10));

    ScalarField f = fill(g, [](double x, double y) { return std::sin(x) * std::cos(2.0 * y) + y; });
    CHECK(sobolev_norm(f, 1) >= sobolev_norm(f, 0));
    CHECK(sobolev_norm(f, 3) >= sobolev_norm(f, 2));
    CHECK_THROWS_AS(sobolev_norm(f, 4), ConfigError);
    CHECK_THROWS_AS(sobolev_norm(f, -1), ConfigError);
}

TEST_CASE("dealias removes modes above the 2/3 cutoff and keeps those below") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    ScalarField low = fill(g, [](double x, double y) { return std::cos(3.0 * x) * y; });
    ScalarField kept = dealias(low);
    double err = 0.0;
    for (size_t n = 0; n < kept.v.size(); ++n) err = std::max(err, std::abs(kept.v[n] - low.v[n]));
    CHECK(err <= 1e-12);

    ScalarField high = fill(g, [](double x, double) { return std::cos(14.0 * x); });
    ScalarField gone = dealias(high);
    CHECK(l2_norm(gone) <= 1e-12 * l2_norm(high));
}

TEST_CASE("wall normal helpers") {
    auto g = make_grid(DomainKind::channel, 32, 17);
    VectorField v(g);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i) {
            v.c1[g->node(j, i)] = 1.0;
            v.c2[g->node(j, i)] = std::cos(g->xs[i]);  // nonzero at walls
        }
    CHECK(max_wall_normal(v) == doctest::Approx(1.0));
    const double corrected = zero_wall_normal(v);
    CHECK(corrected == doctest::Approx(1.0));
    CHECK(max_wall_normal(v) == 0.0);
}
