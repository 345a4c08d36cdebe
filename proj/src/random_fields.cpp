#include "machlab/random_fields.hpp"

#include <cmath>
#include <random>

#include "machlab/errors.hpp"

namespace machlab {

namespace {

class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }  // [0,1), reproducible
    double sym() { return 2.0 * uniform() - 1.0; }

  private:
    std::mt19937_64 eng_;
};

// Sum of trig(k x) * profile_m(y) terms. Wall profiles: sin for zero trace,
// cos for zero normal derivative at both walls.
ScalarField random_modes(const GridPtr& g, Rng& rng, int max_mode, double decay,
                         bool sine_profile) {
    ScalarField f(g);
    const double a = g->wall_a, span = g->wall_b - g->wall_a;
    for (int k = 0; k <= max_mode; ++k) {
        for (int m = 1; m <= max_mode; ++m) {
            const double amp = rng.sym() / std::pow(1.0 + k + m, decay);
            const double phase = 2.0 * M_PI * rng.uniform();
            const double kk = 2.0 * M_PI * k / g->length_x;
            for (int j = 0; j < g->ny; ++j) {
                const double yarg = M_PI * m * (g->ys[j] - a) / span;
                const double prof = sine_profile ? std::sin(yarg) : std::cos(yarg);
                for (int i = 0; i < g->nx; ++i)
                    f(j, i) += amp * std::cos(kk * g->xs[i] + phase) * prof;
            }
        }
    }
    return f;
}

}  // namespace

VectorField random_solenoidal_field(const GridPtr& grid, uint64_t seed, int max_mode,
                                    double amplitude) {
    Rng rng(seed);
    ScalarField psi = random_modes(grid, rng, max_mode, 2.0, /*sine_profile=*/true);
    VectorField u = perp(gradient(psi));
    const double n = l2_norm(u);
    if (n > 0.0) scale(u, amplitude / n);
    return u;
}

ScalarField random_scalar_field(const GridPtr& grid, uint64_t seed, int max_mode,
                                double amplitude) {
    Rng rng(seed);
    ScalarField f = random_modes(grid, rng, max_mode, 2.0, /*sine_profile=*/false);
    subtract_mean(f);
    const double n = l2_norm(f);
    if (n > 0.0) scale(f, amplitude / n);
    return f;
}

State random_band_limited_state(const GridPtr& grid, uint64_t seed,
                                const RandomStateOptions& opts) {
    Rng rng(seed);
    State s(grid, 1.0);

    ScalarField psi = random_modes(grid, rng, opts.max_mode, opts.decay, true);
    VectorField slow = perp(gradient(psi));

    ScalarField chi = random_modes(grid, rng, opts.max_mode, opts.decay, false);
    VectorField fast = gradient(chi);

    ScalarField rho = random_modes(grid, rng, opts.max_mode, opts.decay, false);
    subtract_mean(rho);

    const double ws = 1.0 - opts.fast_fraction, wf = opts.fast_fraction;
    double nslow = l2_norm(slow), nfast = l2_norm(fast), nrho = l2_norm(rho);
    if (nslow > 0.0) scale(slow, ws / nslow);
    if (nfast > 0.0) scale(fast, wf / nfast);
    if (nrho > 0.0) scale(rho, wf / nrho);

    s.u = lincomb(1.0, slow, 1.0, fast);
    s.rho = rho;

    if (opts.include_harmonic && grid->kind == DomainKind::annulus) {
        auto basis = harmonic_basis(grid);
        for (const VectorField& h : basis) axpy(0.3 * rng.sym(), h, s.u);
    }

    const double n = l2_norm(s.as_pair());
    if (n > 0.0) {
        scale(s.u, opts.amplitude / n);
        scale(s.rho, opts.amplitude / n);
    }
    // the cos profiles have analytically vanishing normal derivatives; remove
    // the residual truncation so states sit exactly in the solution space
    zero_wall_normal(s.u);
    subtract_mean(s.rho);
    return s;
}

}  // namespace machlab
