#include "machlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "machlab/errors.hpp"

namespace machlab {

ConvergenceReport fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw ConfigError("fit_rate: need at least 3 ladder points");
    ConvergenceReport rep;
    for (const auto& [eps, err] : points) {
        if (!(eps > 0.0)) throw ConfigError("fit_rate: epsilons must be positive");
        if (!(err >= 0.0) || !std::isfinite(err)) throw ConfigError("fit_rate: bad error value");
        rep.epsilons.push_back(eps);
        double e = err;
        if (e < 1e-15) {
            e = 1e-15;
            rep.floored = true;
        }
        rep.errors.push_back(e);
    }
    for (size_t i = 1; i < rep.epsilons.size(); ++i)
        if (rep.epsilons[i] >= rep.epsilons[i - 1])
            throw ConfigError("fit_rate: epsilons must be strictly decreasing");

    const size_t n = rep.epsilons.size();
    double xbar = 0.0, ybar = 0.0;
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        xs[i] = std::log(rep.epsilons[i]);
        ys[i] = std::log(rep.errors[i]);
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    rep.fitted_slope = sxy / sxx;
    const double icept = ybar - rep.fitted_slope * xbar;
    rep.fit_residual = 0.0;
    for (size_t i = 0; i < n; ++i)
        rep.fit_residual =
            std::max(rep.fit_residual, std::abs(ys[i] - icept - rep.fitted_slope * xs[i]));
    return rep;
}

double fast_fast_residual(const State& s, const PressureLaw& law, const Projector& proj) {
    Decomposition d = proj.project_Q(s);
    const double nq = sobolev_norm(d.fast, 1);
    if (nq <= 1e-13 * std::max(1.0, l2_norm(s.as_pair()))) return 0.0;
    Pair quad = nonlinear_term(d.fast, d.fast, s.epsilon, law, true);
    Pair slow_part = proj.project_P(quad);
    return l2_norm(slow_part) / (nq * nq);
}

double fast_slow_average(const Trajectory& traj, const PressureLaw& law, const Projector& proj) {
    if (traj.states.size() < 5)
        throw ConfigError("fast_slow_average: need at least 5 snapshots");
    Pair acc(proj.grid());
    Pair prev;
    double prev_t = 0.0;
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const State& s = traj.states[i];
        Decomposition d = proj.project_Q(s);
        Pair cross = nonlinear_term(d.slow, d.fast, 0.0, law, true);
        Pair cross2 = nonlinear_term(d.fast, d.slow, 0.0, law, true);
        axpy(1.0, cross2.rho, cross.rho);
        axpy(1.0, cross2.u, cross.u);
        Pair integrand = proj.project_P(cross);
        if (i > 0) {
            const double h = 0.5 * (s.time - prev_t);
            axpy(h, prev.rho, acc.rho);
            axpy(h, prev.u, acc.u);
            axpy(h, integrand.rho, acc.rho);
            axpy(h, integrand.u, acc.u);
        }
        prev = std::move(integrand);
        prev_t = s.time;
    }
    return l2_norm(acc);
}

std::pair<std::vector<double>, std::vector<double>> slow_residual(const Trajectory& traj,
                                                                  const Projector& proj) {
    if (traj.states.size() < 5) throw ConfigError("slow_residual: need at least 5 snapshots");
    std::vector<double> times, values;
    VectorField up0;
    VectorField cum(proj.grid());
    VectorField prev;
    double prev_t = 0.0;
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const State& s = traj.states[i];
        VectorField up = proj.project_Q(s).slow.u;
        VectorField integrand = proj.leray(advect(up, up, true));
        if (i == 0) {
            up0 = up;
            times.push_back(s.time);
            values.push_back(0.0);  // exactly zero at the initial time
        } else {
            const double h = 0.5 * (s.time - prev_t);
            axpy(h, prev, cum);
            axpy(h, integrand, cum);
            VectorField r = lincomb(1.0, up, -1.0, up0);
            axpy(1.0, cum, r);
            times.push_back(s.time);
            values.push_back(l2_norm(r));
        }
        prev = std::move(integrand);
        prev_t = s.time;
    }
    return {times, values};
}

double strong_convergence_error(const Trajectory& traj, const IncTrajectory& ref, int s,
                                const Projector& proj) {
    if (s < 0 || s > 2) throw ConfigError("strong_convergence_error: s must be in {0,1,2}");
    if (traj.states.empty() || ref.fields.empty())
        throw ConfigError("strong_convergence_error: empty trajectory");
    if (!traj.states.front().grid()->same_as(*ref.fields.front().grid))
        throw ConfigError("strong_convergence_error: grid mismatch");
    if (traj.states.back().time > ref.times.back() + 1e-9)
        throw ConfigError("strong_convergence_error: reference ends too early");

    // 4-point Lagrange interpolation of the reference onto time t
    auto interpolate = [&](double t) {
        const auto& ts = ref.times;
        size_t k = std::upper_bound(ts.begin(), ts.end(), t) - ts.begin();
        size_t lo = (k >= 2) ? k - 2 : 0;
        if (lo + 4 > ts.size()) lo = ts.size() - 4;
        VectorField out(ref.fields.front().grid);
        for (size_t a = lo; a < lo + 4; ++a) {
            double w = 1.0;
            for (size_t b = lo; b < lo + 4; ++b)
                if (b != a) w *= (t - ts[b]) / (ts[a] - ts[b]);
            axpy(w, ref.fields[a], out);
        }
        return out;
    };

    double worst = 0.0;
    for (const State& st : traj.states) {
        VectorField up = proj.project_Q(st).slow.u;
        VectorField v = interpolate(st.time);
        VectorField diff = lincomb(1.0, up, -1.0, v);
        worst = std::max(worst, sobolev_norm(diff, s));
    }
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

// wall coordinate mapped to [0, pi] so sin/cos profiles carry the right
// trace/flux behavior on either domain
double wall_arg(const Grid& g, int j) {
    return M_PI * (g.ys[j] - g.wall_a) / (g.wall_b - g.wall_a);
}

}  // namespace

TestFunction::TestFunction(Kind kind, GridPtr grid)
    : kind_(kind), grid_(grid), chi_(grid), rhop_(grid), up_(grid) {
    const Grid& g = *grid_;
    ScalarField psi(grid_);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.xs[i], s = wall_arg(g, j);
            chi_(j, i) = std::cos(x) * std::cos(s);
            rhop_(j, i) = std::cos(x) * std::cos(s) + 0.5 * std::sin(x) * std::cos(2.0 * s);
            psi(j, i) = std::sin(x) * std::sin(s);
        }
    subtract_mean(rhop_);
    up_ = perp(gradient(psi));
    zero_wall_normal(up_);
}

const char* TestFunction::name(Kind k) {
    switch (k) {
        case Kind::prange: return "prange";
        case Kind::qrange: return "qrange";
        case Kind::generic: return "generic";
        case Kind::qrange_static: return "qrange_static";
    }
    return "?";
}

Pair TestFunction::eval(double t) const {
    // smooth O(1) modulations with O(1) time derivatives
    const double a = 1.0 + 0.5 * std::sin(3.0 * t);
    const double b = std::cos(2.0 * t) + 0.3;
    Pair out(grid_);
    switch (kind_) {
        case Kind::prange:
            out.u = up_;
            scale(out.u, a);
            break;
        case Kind::qrange:
            out.rho = rhop_;
            scale(out.rho, b);
            out.u = gradient(chi_);
            scale(out.u, a);
            break;
        case Kind::qrange_static:
            out.rho = rhop_;
            out.u = gradient(chi_);
            break;
        case Kind::generic:
            out.rho = rhop_;
            scale(out.rho, b);
            out.u = gradient(chi_);
            scale(out.u, a);
            axpy(0.7 * b, up_, out.u);
            break;
    }
    return out;
}

Pair TestFunction::eval_dt(double t) const {
    const double da = 1.5 * std::cos(3.0 * t);
    const double db = -2.0 * std::sin(2.0 * t);
    Pair out(grid_);
    switch (kind_) {
        case Kind::prange:
            out.u = up_;
            scale(out.u, da);
            break;
        case Kind::qrange:
            out.rho = rhop_;
            scale(out.rho, db);
            out.u = gradient(chi_);
            scale(out.u, da);
            break;
        case Kind::qrange_static:
            break;
        case Kind::generic:
            out.rho = rhop_;
            scale(out.rho, db);
            out.u = gradient(chi_);
            scale(out.u, da);
            axpy(0.7 * db, up_, out.u);
            break;
    }
    return out;
}

WeakPairingResult weak_pairing(const Trajectory& traj, const TestFunction& test,
                               const Projector& proj) {
    if (traj.states.size() < 5) throw ConfigError("weak_pairing: need at least 5 snapshots");
    WeakPairingResult res;
    double acc = 0.0, dt_acc = 0.0, linf = 0.0;
    double prev_val = 0.0, prev_dt = 0.0, prev_t = 0.0;
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const State& s = traj.states[i];
        Pair tf = test.eval(s.time);
        Pair tfdt = test.eval_dt(s.time);
        Pair uq = proj.project_Q(s).fast;  // (rho, u^Q)
        const double val = inner(uq, tf);
        const double ndt = inner(tfdt, tfdt);
        linf = std::max(linf, l2_norm(tf));
        if (i > 0) {
            const double h = 0.5 * (s.time - prev_t);
            acc += h * (prev_val + val);
            dt_acc += h * (prev_dt + ndt);
        }
        prev_val = val;
        prev_dt = ndt;
        prev_t = s.time;
    }
    res.pairing = std::abs(acc);
    res.normalizer = linf + std::sqrt(std::max(0.0, dt_acc));
    return res;
}

double vorticity_transport_residual(const Trajectory& traj) {
    if (traj.states.size() < 3)
        throw ConfigError("vorticity_transport_residual: need at least 3 snapshots");
    auto interior_l2 = [](const ScalarField& f) {
        const Grid& g = *f.grid;
        double s = 0.0;
        for (int j = 1; j < g.ny - 1; ++j)
            for (int i = 0; i < g.nx; ++i) s += g.wq[g.node(j, i)] * f(j, i) * f(j, i);
        return std::sqrt(s);
    };
    double worst = 0.0;
    for (size_t i = 1; i + 1 < traj.states.size(); ++i) {
        const State& a = traj.states[i - 1];
        const State& b = traj.states[i];
        const State& c = traj.states[i + 1];
        ScalarField wa = curl2d(a.u);
        ScalarField wb = curl2d(b.u);
        ScalarField wc = curl2d(c.u);
        const double span = c.time - a.time;
        ScalarField res = lincomb(1.0 / span, wc, -1.0 / span, wa);
        ScalarField adv = advect_scalar(b.u, wb, true);
        axpy(1.0, adv, res);
        ScalarField stretch = dprod(wb, divergence(b.u), true);
        axpy(1.0, stretch, res);
        worst = std::max(worst, interior_l2(res));
    }
    return worst;
}

}  // namespace machlab
