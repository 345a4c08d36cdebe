#include "machlab/ops.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <stdexcept>

#include "machlab/errors.hpp"

namespace machlab {

namespace {

struct Workspace {
    std::vector<std::complex<double>> spec;
    std::vector<double> scratch;
};

Workspace& workspace_for(const Grid& g) {
    thread_local std::map<const Grid*, Workspace> cache;
    Workspace& w = cache[&g];
    const size_t nspec = static_cast<size_t>(g.ny) * (g.nx / 2 + 1);
    if (w.spec.size() < nspec) w.spec.resize(nspec);
    const size_t nreal = static_cast<size_t>(g.ny) * g.nx;
    if (w.scratch.size() < nreal) w.scratch.resize(nreal);
    return w;
}

void forward_x(const Grid& g, const double* in, std::complex<double>* out) {
    fftw_execute_dft_r2c(g.plan_r2c(), const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void inverse_x(const Grid& g, std::complex<double>* in, double* out) {
    fftw_execute_dft_c2r(g.plan_c2r(), reinterpret_cast<fftw_complex*>(in), out);
    const double inv = 1.0 / g.nx;
    const size_t n = static_cast<size_t>(g.ny) * g.nx;
    for (size_t i = 0; i < n; ++i) out[i] *= inv;
}

// out = d/dx in (periodic coordinate). The Nyquist mode is dropped.
void ddx_into(const Grid& g, const double* in, double* out) {
    Workspace& w = workspace_for(g);
    forward_x(g, in, w.spec.data());
    const int nm = g.nx / 2 + 1;
    for (int j = 0; j < g.ny; ++j) {
        std::complex<double>* row = w.spec.data() + static_cast<size_t>(j) * nm;
        for (int m = 0; m < nm; ++m) {
            const double k = (m < g.nx / 2) ? g.kx[m] : 0.0;
            row[m] = std::complex<double>(-k * row[m].imag(), k * row[m].real());
        }
    }
    inverse_x(g, w.spec.data(), out);
}

// out = Dy in (wall-normal collocation derivative)
void ddy_into(const Grid& g, const double* in, double* out) {
    const int ny = g.ny, nx = g.nx;
    for (int i = 0; i < ny; ++i) {
        double* orow = out + static_cast<size_t>(i) * nx;
        std::memset(orow, 0, sizeof(double) * nx);
        const double* drow = g.dy.data() + static_cast<size_t>(i) * ny;
        for (int j = 0; j < ny; ++j) {
            const double d = drow[j];
            if (d == 0.0) continue;
            const double* irow = in + static_cast<size_t>(j) * nx;
            for (int ix = 0; ix < nx; ++ix) orow[ix] += d * irow[ix];
        }
    }
}

void mask_x_into(const Grid& g, const double* in, double* out) {
    Workspace& w = workspace_for(g);
    forward_x(g, in, w.spec.data());
    const int nm = g.nx / 2 + 1;
    for (int j = 0; j < g.ny; ++j) {
        std::complex<double>* row = w.spec.data() + static_cast<size_t>(j) * nm;
        for (int m = 0; m < nm; ++m)
            if (!g.keep_x[m]) row[m] = 0.0;
    }
    inverse_x(g, w.spec.data(), out);
}

void check_same_grid(const GridPtr& a, const GridPtr& b) {
    if (a.get() != b.get()) throw ConfigError("fields live on different grids");
}

}  // namespace

ScalarField ddx(const ScalarField& f) {
    ScalarField out(f.grid);
    ddx_into(*f.grid, f.v.data(), out.v.data());
    return out;
}

ScalarField ddy(const ScalarField& f) {
    ScalarField out(f.grid);
    ddy_into(*f.grid, f.v.data(), out.v.data());
    return out;
}

VectorField gradient(const ScalarField& f) {
    const Grid& g = *f.grid;
    VectorField out(f.grid);
    if (g.kind == DomainKind::channel) {
        ddx_into(g, f.v.data(), out.c1.data());
        ddy_into(g, f.v.data(), out.c2.data());
    } else {
        ddy_into(g, f.v.data(), out.c1.data());  // d/dr
        ddx_into(g, f.v.data(), out.c2.data());
        for (int j = 0; j < g.ny; ++j) {
            const double inv_r = 1.0 / g.ys[j];
            for (int i = 0; i < g.nx; ++i) out.c2[g.node(j, i)] *= inv_r;
        }
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = *v.grid;
    ScalarField out(v.grid);
    if (g.kind == DomainKind::channel) {
        ddx_into(g, v.c1.data(), out.v.data());
        ScalarField tmp(v.grid);
        ddy_into(g, v.c2.data(), tmp.v.data());
        for (int n = 0; n < g.num_nodes(); ++n) out.v[n] += tmp.v[n];
    } else {
        // (1/r) d(r u_r)/dr + (1/r) d(u_theta)/dtheta
        ScalarField rur(v.grid);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) rur.v[g.node(j, i)] = g.ys[j] * v.c1[g.node(j, i)];
        ddy_into(g, rur.v.data(), out.v.data());
        ScalarField tmp(v.grid);
        ddx_into(g, v.c2.data(), tmp.v.data());
        for (int j = 0; j < g.ny; ++j) {
            const double inv_r = 1.0 / g.ys[j];
            for (int i = 0; i < g.nx; ++i) {
                const int n = g.node(j, i);
                out.v[n] = inv_r * (out.v[n] + tmp.v[n]);
            }
        }
    }
    return out;
}

ScalarField curl2d(const VectorField& v) {
    const Grid& g = *v.grid;
    ScalarField out(v.grid);
    if (g.kind == DomainKind::channel) {
        ddx_into(g, v.c2.data(), out.v.data());
        ScalarField tmp(v.grid);
        ddy_into(g, v.c1.data(), tmp.v.data());
        for (int n = 0; n < g.num_nodes(); ++n) out.v[n] -= tmp.v[n];
    } else {
        // (1/r) [ d(r u_theta)/dr - d(u_r)/dtheta ]
        ScalarField rut(v.grid);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) rut.v[g.node(j, i)] = g.ys[j] * v.c2[g.node(j, i)];
        ddy_into(g, rut.v.data(), out.v.data());
        ScalarField tmp(v.grid);
        ddx_into(g, v.c1.data(), tmp.v.data());
        for (int j = 0; j < g.ny; ++j) {
            const double inv_r = 1.0 / g.ys[j];
            for (int i = 0; i < g.nx; ++i) {
                const int n = g.node(j, i);
                out.v[n] = inv_r * (out.v[n] - tmp.v[n]);
            }
        }
    }
    return out;
}

VectorField perp(const VectorField& v) {
    VectorField out(v.grid);
    for (size_t n = 0; n < v.c1.size(); ++n) {
        out.c1[n] = -v.c2[n];
        out.c2[n] = v.c1[n];
    }
    return out;
}

// The 2/3-rule mask acts in the periodic direction, where nodal-product
// aliasing wraps onto retained modes. Wall-normal products rely on
// collocation resolution: a polynomial-degree mask would redistribute the
// removed content onto the wall nodes and break nodal wall tangency.
void dealias_inplace(ScalarField& f) {
    const Grid& g = *f.grid;
    std::vector<double> tmp(f.v.size());
    mask_x_into(g, f.v.data(), tmp.data());
    f.v.swap(tmp);
}

ScalarField dealias(const ScalarField& f) {
    ScalarField out = f;
    dealias_inplace(out);
    return out;
}

VectorField dealias(const VectorField& v) {
    VectorField out = v;
    ScalarField tmp(v.grid);
    tmp.v = out.c1;
    dealias_inplace(tmp);
    out.c1 = tmp.v;
    tmp.v = out.c2;
    dealias_inplace(tmp);
    out.c2 = tmp.v;
    return out;
}

ScalarField dprod(const ScalarField& a, const ScalarField& b, bool do_dealias) {
    check_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    for (size_t n = 0; n < out.v.size(); ++n) out.v[n] = a.v[n] * b.v[n];
    if (do_dealias) dealias_inplace(out);
    return out;
}

ScalarField advect_scalar(const VectorField& a, const ScalarField& f, bool do_dealias) {
    check_same_grid(a.grid, f.grid);
    const VectorField gf = gradient(f);
    ScalarField out(f.grid);
    for (size_t n = 0; n < out.v.size(); ++n)
        out.v[n] = a.c1[n] * gf.c1[n] + a.c2[n] * gf.c2[n];
    if (do_dealias) dealias_inplace(out);
    return out;
}

VectorField advect(const VectorField& a, const VectorField& b, bool do_dealias) {
    check_same_grid(a.grid, b.grid);
    const Grid& g = *a.grid;
    ScalarField b1(a.grid), b2(a.grid);
    b1.v = b.c1;
    b2.v = b.c2;
    ScalarField t1 = advect_scalar(a, b1, false);
    ScalarField t2 = advect_scalar(a, b2, false);
    VectorField out(a.grid);
    out.c1 = t1.v;
    out.c2 = t2.v;
    if (g.kind == DomainKind::annulus) {
        // curvature terms: (a.grad b)_r -= a_th b_th / r ; (a.grad b)_th += a_th b_r / r
        for (int j = 0; j < g.ny; ++j) {
            const double inv_r = 1.0 / g.ys[j];
            for (int i = 0; i < g.nx; ++i) {
                const int n = g.node(j, i);
                out.c1[n] -= a.c2[n] * b.c2[n] * inv_r;
                out.c2[n] += a.c2[n] * b.c1[n] * inv_r;
            }
        }
    }
    if (do_dealias) {
        ScalarField tmp(a.grid);
        tmp.v = out.c1;
        dealias_inplace(tmp);
        out.c1 = tmp.v;
        tmp.v = out.c2;
        dealias_inplace(tmp);
        out.c2 = tmp.v;
    }
    return out;
}

double integral(const ScalarField& f) {
    const Grid& g = *f.grid;
    double s = 0.0;
    for (int n = 0; n < g.num_nodes(); ++n) s += g.wq[n] * f.v[n];
    return s;
}

double inner(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid);
    const Grid& g = *a.grid;
    double s = 0.0;
    for (int n = 0; n < g.num_nodes(); ++n) s += g.wq[n] * a.v[n] * b.v[n];
    return s;
}

double inner(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid, b.grid);
    const Grid& g = *a.grid;
    double s = 0.0;
    for (int n = 0; n < g.num_nodes(); ++n) s += g.wq[n] * (a.c1[n] * b.c1[n] + a.c2[n] * b.c2[n]);
    return s;
}

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }
double l2_norm(const VectorField& v) { return std::sqrt(std::max(0.0, inner(v, v))); }

double mean(const ScalarField& f) { return integral(f) / f.grid->area; }

void subtract_mean(ScalarField& f) {
    const double m = mean(f);
    for (double& x : f.v) x -= m;
}

namespace {

// covariant first-derivative components: e1 = periodic-direction derivative
// with metric, e2 = wall-normal derivative
ScalarField apply_e1(const ScalarField& f) {
    const Grid& g = *f.grid;
    ScalarField out = ddx(f);
    if (g.kind == DomainKind::annulus) {
        for (int j = 0; j < g.ny; ++j) {
            const double inv_r = 1.0 / g.ys[j];
            for (int i = 0; i < g.nx; ++i) out.v[g.node(j, i)] *= inv_r;
        }
    }
    return out;
}

double sobolev_sq(const ScalarField& f, int s) {
    if (s < 0 || s > 3) throw ConfigError("sobolev_norm: order must be in {0,1,2,3}");
    double total = 0.0;
    ScalarField ex = f;
    for (int bx = 0; bx <= s; ++bx) {
        if (bx > 0) ex = apply_e1(ex);
        ScalarField exy = ex;
        for (int by = 0; bx + by <= s; ++by) {
            if (by > 0) exy = ddy(exy);
            total += inner(exy, exy);
        }
    }
    return total;
}

}  // namespace

double sobolev_norm(const ScalarField& f, int s) { return std::sqrt(sobolev_sq(f, s)); }

double sobolev_norm(const VectorField& v, int s) {
    ScalarField a(v.grid), b(v.grid);
    a.v = v.c1;
    b.v = v.c2;
    return std::sqrt(sobolev_sq(a, s) + sobolev_sq(b, s));
}

void wall_normal(const VectorField& v, std::vector<double>& bottom, std::vector<double>& top) {
    const Grid& g = *v.grid;
    const std::vector<double>& comp = (g.kind == DomainKind::channel) ? v.c2 : v.c1;
    bottom.resize(g.nx);
    top.resize(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        bottom[i] = -comp[g.node(0, i)];  // outward normal points toward decreasing y/r
        top[i] = comp[g.node(g.ny - 1, i)];
    }
}

double max_wall_normal(const VectorField& v) {
    std::vector<double> b, t;
    wall_normal(v, b, t);
    double m = 0.0;
    for (double x : b) m = std::max(m, std::abs(x));
    for (double x : t) m = std::max(m, std::abs(x));
    return m;
}

double zero_wall_normal(VectorField& v) {
    const Grid& g = *v.grid;
    std::vector<double>& comp = (g.kind == DomainKind::channel) ? v.c2 : v.c1;
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        m = std::max(m, std::abs(comp[g.node(0, i)]));
        m = std::max(m, std::abs(comp[g.node(g.ny - 1, i)]));
        comp[g.node(0, i)] = 0.0;
        comp[g.node(g.ny - 1, i)] = 0.0;
    }
    return m;
}

ScalarField zeros_like(const GridPtr& g) { return ScalarField(g); }

void axpy(double a, const ScalarField& x, ScalarField& y) {
    for (size_t n = 0; n < y.v.size(); ++n) y.v[n] += a * x.v[n];
}

void axpy(double a, const VectorField& x, VectorField& y) {
    for (size_t n = 0; n < y.c1.size(); ++n) {
        y.c1[n] += a * x.c1[n];
        y.c2[n] += a * x.c2[n];
    }
}

void scale(ScalarField& f, double a) {
    for (double& x : f.v) x *= a;
}

void scale(VectorField& v, double a) {
    for (double& x : v.c1) x *= a;
    for (double& x : v.c2) x *= a;
}

ScalarField lincomb(double a, const ScalarField& x, double b, const ScalarField& y) {
    ScalarField out(x.grid);
    for (size_t n = 0; n < out.v.size(); ++n) out.v[n] = a * x.v[n] + b * y.v[n];
    return out;
}

VectorField lincomb(double a, const VectorField& x, double b, const VectorField& y) {
    VectorField out(x.grid);
    for (size_t n = 0; n < out.c1.size(); ++n) {
        out.c1[n] = a * x.c1[n] + b * y.c1[n];
        out.c2[n] = a * x.c2[n] + b * y.c2[n];
    }
    return out;
}

bool all_finite(const ScalarField& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const VectorField& v) {
    for (double x : v.c1)
        if (!std::isfinite(x)) return false;
    for (double x : v.c2)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace machlab
