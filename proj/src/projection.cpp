#include "machlab/projection.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <limits>

#include "machlab/errors.hpp"

namespace machlab {

void validate_state(const State& s) {
    if (!all_finite(s.rho) || !all_finite(s.u))
        throw NumericalError("state holds non-finite values");
    const double nr = l2_norm(s.rho);
    const double nu = l2_norm(s.u);
    if (std::abs(integral(s.rho)) > 1e-10 * std::max(nr, 1e-30) && nr > 0.0)
        throw ConfigError("state: density is not mean-zero");
    if (max_wall_normal(s.u) > 1e-10 * std::max(nu, 1e-30) && nu > 0.0)
        throw ConfigError("state: velocity is not wall-tangent");
    if (!(s.epsilon > 0.0 && s.epsilon <= 1.0))
        throw ConfigError("state: epsilon must lie in (0, 1]");
    for (size_t n = 0; n < s.rho.v.size(); ++n) {
        const double total = 1.0 + s.epsilon * s.rho.v[n];
        if (total < 0.5)
            throw VacuumError("state: non-vacuum condition violated", static_cast<int>(n), total);
    }
}

double inner(const Pair& a, const Pair& b) { return inner(a.rho, b.rho) + inner(a.u, b.u); }

double l2_norm(const Pair& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

double sobolev_norm(const Pair& a, int s) {
    const double r = sobolev_norm(a.rho, s);
    const double u = sobolev_norm(a.u, s);
    return std::sqrt(r * r + u * u);
}

Pair lincomb(double a, const Pair& x, double b, const Pair& y) {
    Pair out;
    out.rho = lincomb(a, x.rho, b, y.rho);
    out.u = lincomb(a, x.u, b, y.u);
    return out;
}

Pair apply_L(const Pair& p) {
    Pair out;
    out.rho = divergence(p.u);
    out.u = gradient(p.rho);
    return out;
}

// ---------------------------------------------------------------------------
// Per-mode weighted least squares: minimize ||u - grad phi||_W over potentials
// with (grad phi).n prescribed at the walls. The constrained basis Z holds
// Legendre modes recombined so both wall rows of the derivative vanish; mode
// zero additionally pins the weighted mean. M_k = S + k^2 T with S the
// stiffness and T the metric mass matrix, factored once per mode.
// ---------------------------------------------------------------------------
struct Projector::QSolver {
    GridPtr grid;
    int nm = 0;                  // r2c modes
    int nz = 0;                  // columns of Z (generic mode)
    int nz0 = 0;                 // columns of Z0 (mean-pinned zero mode)
    std::vector<double> Z;       // ny x nz, nodal values
    std::vector<double> Z0;      // ny x nz0
    std::vector<double> part_a;  // particular potentials for unit wall fluxes
    std::vector<double> part_b;
    std::vector<double> ZtKD;    // nz x ny : Z^T D^T W_a   (rhs assembly, normal comp)
    std::vector<double> ZtWc;    // nz x ny : Z^T W_c       (rhs assembly, tangential comp)
    std::vector<double> Z0tKD;
    std::vector<double> Z0tWc;
    std::vector<double> K0;      // ny x ny stiffness D^T W_a D
    std::vector<double> Tmet;    // ny diagonal metric mass (W_b)
    std::vector<double> lu;      // per-mode factors (mode 0 block sized nz, others nz)
    std::vector<int> piv;
    std::vector<double> mats;    // copies for refinement

    explicit QSolver(GridPtr g);
    ScalarField potential(const VectorField& u) const;
};

namespace {

void dense_mul(const double* A, int ra, int ca, const double* B, int cb, double* C) {
    // C (ra x cb) = A (ra x ca) * B (ca x cb), row-major
    for (int i = 0; i < ra; ++i) {
        double* crow = C + static_cast<size_t>(i) * cb;
        std::memset(crow, 0, sizeof(double) * cb);
        const double* arow = A + static_cast<size_t>(i) * ca;
        for (int k = 0; k < ca; ++k) {
            const double a = arow[k];
            if (a == 0.0) continue;
            const double* brow = B + static_cast<size_t>(k) * cb;
            for (int j = 0; j < cb; ++j) crow[j] += a * brow[j];
        }
    }
}

void lu_solve_refined(const double* lu, const double* mat, const int* piv, int n, double* re,
                      double* im) {
    std::vector<double> b(static_cast<size_t>(n) * 2), x, r(static_cast<size_t>(n) * 2);
    for (int j = 0; j < n; ++j) {
        b[2 * j] = re[j];
        b[2 * j + 1] = im[j];
    }
    x = b;
    if (LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', n, 2, lu, n, piv, x.data(), 2) != 0)
        throw NumericalError("projection: triangular solve failed");
    for (int i = 0; i < n; ++i) {
        double s0 = b[2 * i], s1 = b[2 * i + 1];
        const double* arow = mat + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            s0 -= arow[j] * x[2 * j];
            s1 -= arow[j] * x[2 * j + 1];
        }
        r[2 * i] = s0;
        r[2 * i + 1] = s1;
    }
    if (LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', n, 2, lu, n, piv, r.data(), 2) != 0)
        throw NumericalError("projection: refinement solve failed");
    for (int j = 0; j < n; ++j) {
        re[j] = x[2 * j] + r[2 * j];
        im[j] = x[2 * j + 1] + r[2 * j + 1];
    }
}

}  // namespace

Projector::QSolver::QSolver(GridPtr g) : grid(std::move(g)) {
    const Grid& gr = *grid;
    const int ny = gr.ny;
    nm = gr.nx / 2 + 1;

    // Wall constraint rows: outward normal derivative at each wall.
    std::vector<double> row_a(ny), row_b(ny);
    for (int j = 0; j < ny; ++j) {
        row_a[j] = -gr.dy[j];
        row_b[j] = gr.dy[static_cast<size_t>(ny - 1) * ny + j];
    }

    // Nodal Legendre modes and their constraint values.
    std::vector<double> modes(static_cast<size_t>(ny) * ny);  // column j = L_j nodal
    for (int i = 0; i < ny; ++i)
        for (int j = 0; j < ny; ++j)
            modes[static_cast<size_t>(i) * ny + j] = gr.lobatto.to_nodal[static_cast<size_t>(i) * ny + j];
    auto constraint = [&](const double* row, int j) {
        double s = 0.0;
        for (int i = 0; i < ny; ++i) s += row[i] * modes[static_cast<size_t>(i) * ny + j];
        return s;
    };
    const double ca_m2 = constraint(row_a.data(), ny - 2), ca_m1 = constraint(row_a.data(), ny - 1);
    const double cb_m2 = constraint(row_b.data(), ny - 2), cb_m1 = constraint(row_b.data(), ny - 1);
    const double det = ca_m2 * cb_m1 - ca_m1 * cb_m2;
    if (std::abs(det) < 1e-12) throw NumericalError("projection: degenerate constraint pair");

    // Z columns: L_j corrected by the top two degrees to satisfy both
    // constraints. nz = ny - 2.
    nz = ny - 2;
    Z.assign(static_cast<size_t>(ny) * nz, 0.0);
    for (int j = 0; j < nz; ++j) {
        const double ra = constraint(row_a.data(), j), rb = constraint(row_b.data(), j);
        const double alpha = (-ra * cb_m1 + rb * ca_m1) / det;
        const double beta = (-ca_m2 * rb + cb_m2 * ra) / det;
        for (int i = 0; i < ny; ++i)
            Z[static_cast<size_t>(i) * nz + j] = modes[static_cast<size_t>(i) * ny + j] +
                                                 alpha * modes[static_cast<size_t>(i) * ny + (ny - 2)] +
                                                 beta * modes[static_cast<size_t>(i) * ny + (ny - 1)];
    }

    // Particular potentials with unit outward flux at one wall, zero at the other.
    part_a.assign(ny, 0.0);
    part_b.assign(ny, 0.0);
    for (int i = 0; i < ny; ++i) {
        const double m2 = modes[static_cast<size_t>(i) * ny + (ny - 2)];
        const double m1 = modes[static_cast<size_t>(i) * ny + (ny - 1)];
        part_a[i] = (cb_m1 * m2 - cb_m2 * m1) / det;   // constraint_a = 1, constraint_b = 0
        part_b[i] = (-ca_m1 * m2 + ca_m2 * m1) / det;  // constraint_a = 0, constraint_b = 1
    }

    // Mode-zero basis: drop the constant column, subtract weighted means.
    nz0 = nz - 1;
    Z0.assign(static_cast<size_t>(ny) * nz0, 0.0);
    double wtot = 0.0;
    for (int i = 0; i < ny; ++i) wtot += gr.wy[i] * gr.jac[i];
    for (int j = 0; j < nz0; ++j) {
        double m = 0.0;
        for (int i = 0; i < ny; ++i) m += gr.wy[i] * gr.jac[i] * Z[static_cast<size_t>(i) * nz + (j + 1)];
        m /= wtot;
        for (int i = 0; i < ny; ++i)
            Z0[static_cast<size_t>(i) * nz0 + j] = Z[static_cast<size_t>(i) * nz + (j + 1)] - m;
    }

    // Weighted operators. W_a = diag(wy*jac) on the normal derivative, and the
    // tangential metric contributes k^2 * W_b with W_b = wy*jac on the channel
    // and wy/r on the annulus.
    std::vector<double> WaD(static_cast<size_t>(ny) * ny);
    for (int i = 0; i < ny; ++i) {
        const double w = gr.wy[i] * gr.jac[i];
        for (int j = 0; j < ny; ++j)
            WaD[static_cast<size_t>(i) * ny + j] = w * gr.dy[static_cast<size_t>(i) * ny + j];
    }
    K0.assign(static_cast<size_t>(ny) * ny, 0.0);
    for (int i = 0; i < ny; ++i)
        for (int k = 0; k < ny; ++k) {
            const double d = gr.dy[static_cast<size_t>(k) * ny + i];  // D^T entry (i,k)
            if (d == 0.0) continue;
            for (int j = 0; j < ny; ++j)
                K0[static_cast<size_t>(i) * ny + j] += d * WaD[static_cast<size_t>(k) * ny + j];
        }
    Tmet.resize(ny);
    for (int i = 0; i < ny; ++i)
        Tmet[i] = (gr.kind == DomainKind::annulus) ? gr.wy[i] / gr.ys[i] : gr.wy[i];

    // rhs assembly blocks: Z^T D^T W_a and Z^T W_c (W_c = wy on both domains:
    // the annulus metric r and the 1/r of the angular derivative cancel).
    auto transpose_mul = [&](const std::vector<double>& Zm, int cols, std::vector<double>& ZtA,
                             std::vector<double>& ZtW) {
        std::vector<double> Zt(static_cast<size_t>(cols) * ny);
        for (int i = 0; i < ny; ++i)
            for (int j = 0; j < cols; ++j)
                Zt[static_cast<size_t>(j) * ny + i] = Zm[static_cast<size_t>(i) * cols + j];
        ZtA.assign(static_cast<size_t>(cols) * ny, 0.0);
        // Z^T (D^T W_a) : (cols x ny) * (ny x ny) with (D^T W_a)_{ij} = D_{ji} w_j... use WaD^T
        std::vector<double> DtWa(static_cast<size_t>(ny) * ny);
        for (int i = 0; i < ny; ++i)
            for (int j = 0; j < ny; ++j)
                DtWa[static_cast<size_t>(i) * ny + j] = WaD[static_cast<size_t>(j) * ny + i];
        dense_mul(Zt.data(), cols, ny, DtWa.data(), ny, ZtA.data());
        ZtW.assign(static_cast<size_t>(cols) * ny, 0.0);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < ny; ++i)
                ZtW[static_cast<size_t>(j) * ny + i] = Zt[static_cast<size_t>(j) * ny + i] * gr.wy[i];
    };
    transpose_mul(Z, nz, ZtKD, ZtWc);
    transpose_mul(Z0, nz0, Z0tKD, Z0tWc);

    // Factor M_k = Z^T K0 Z + k^2 Z^T diag(Tmet) Z per mode (Z0 blocks for k=0).
    const size_t blk = static_cast<size_t>(nz) * nz;
    lu.assign(static_cast<size_t>(nm) * blk, 0.0);
    mats.assign(static_cast<size_t>(nm) * blk, 0.0);
    piv.assign(static_cast<size_t>(nm) * nz, 0);
    std::vector<double> KZ(static_cast<size_t>(ny) * nz);
    for (int m = 0; m < nm; ++m) {
        const bool zero_mode = (m == 0);
        const std::vector<double>& Zm = zero_mode ? Z0 : Z;
        const int cols = zero_mode ? nz0 : nz;
        const double k = gr.kx[m];
        std::vector<double> Kk = K0;
        for (int i = 0; i < ny; ++i)
            for (int j = 0; j < ny; ++j)
                Kk[static_cast<size_t>(i) * ny + j] +=
                    (i == j ? k * k * Tmet[i] : 0.0);
        dense_mul(Kk.data(), ny, ny, Zm.data(), cols, KZ.data());
        double* M = mats.data() + static_cast<size_t>(m) * blk;
        for (int i = 0; i < cols; ++i)
            for (int j = 0; j < cols; ++j) {
                double s = 0.0;
                for (int l = 0; l < ny; ++l)
                    s += Zm[static_cast<size_t>(l) * cols + i] * KZ[static_cast<size_t>(l) * cols + j];
                M[static_cast<size_t>(i) * cols + j] = s;
            }
        double* F = lu.data() + static_cast<size_t>(m) * blk;
        std::memcpy(F, M, sizeof(double) * cols * cols);
        if (LAPACKE_dgetrf(LAPACK_ROW_MAJOR, cols, cols, F, cols,
                           reinterpret_cast<lapack_int*>(piv.data() + static_cast<size_t>(m) * nz)) != 0)
            throw NumericalError("projection: singular least-squares block");
    }
}

ScalarField Projector::QSolver::potential(const VectorField& u) const {
    const Grid& gr = *grid;
    const int ny = gr.ny, nx = gr.nx;

    // mode coefficients of the normal and tangential velocity components
    const std::vector<double>& comp_n = (gr.kind == DomainKind::channel) ? u.c2 : u.c1;
    const std::vector<double>& comp_t = (gr.kind == DomainKind::channel) ? u.c1 : u.c2;
    std::vector<std::complex<double>> un(static_cast<size_t>(ny) * nm), ut(un.size());
    fftw_execute_dft_r2c(gr.plan_r2c(), const_cast<double*>(comp_n.data()),
                         reinterpret_cast<fftw_complex*>(un.data()));
    fftw_execute_dft_r2c(gr.plan_r2c(), const_cast<double*>(comp_t.data()),
                         reinterpret_cast<fftw_complex*>(ut.data()));

    std::vector<std::complex<double>> phi(static_cast<size_t>(ny) * nm, 0.0);
    std::vector<double> re(nz), im(nz), pre(ny), pim(ny);
    for (int m = 0; m < nm; ++m) {
        if (m == nx / 2) continue;  // Nyquist annihilated
        const bool zero_mode = (m == 0);
        const int cols = zero_mode ? nz0 : nz;
        const std::vector<double>& ZtA = zero_mode ? Z0tKD : ZtKD;
        const std::vector<double>& ZtW = zero_mode ? Z0tWc : ZtWc;
        const std::vector<double>& Zm = zero_mode ? Z0 : Z;
        const double k = gr.kx[m];

        // particular part from the wall fluxes (outward): g_a = -u_n(wall_a),
        // g_b = +u_n(wall_b)
        const std::complex<double> ga = -un[m];
        const std::complex<double> gb = un[static_cast<size_t>(ny - 1) * nm + m];
        for (int i = 0; i < ny; ++i) {
            const std::complex<double> p = ga * part_a[i] + gb * part_b[i];
            pre[i] = p.real();
            pim[i] = p.imag();
        }

        // rhs: Z^T (D^T W_a u_n - i k W_c u_t) - Z^T K_k phi_p
        for (int j = 0; j < cols; ++j) {
            std::complex<double> s = 0.0;
            const double* arow = ZtA.data() + static_cast<size_t>(j) * ny;
            const double* wrow = ZtW.data() + static_cast<size_t>(j) * ny;
            for (int i = 0; i < ny; ++i) {
                const std::complex<double> uni = un[static_cast<size_t>(i) * nm + m];
                const std::complex<double> uti = ut[static_cast<size_t>(i) * nm + m];
                s += arow[i] * uni;
                s -= std::complex<double>(0.0, k) * wrow[i] * uti;
            }
            re[j] = s.real();
            im[j] = s.imag();
        }
        if (ga != 0.0 || gb != 0.0) {
            // subtract Z^T K_k phi_p = (Z^T D^T W_a D + k^2 Z^T W_b) phi_p
            std::vector<double> dre(ny, 0.0), dim(ny, 0.0);
            for (int i = 0; i < ny; ++i) {
                double sr = 0.0, si = 0.0;
                const double* drow = gr.dy.data() + static_cast<size_t>(i) * ny;
                for (int l = 0; l < ny; ++l) {
                    sr += drow[l] * pre[l];
                    si += drow[l] * pim[l];
                }
                dre[i] = sr;
                dim[i] = si;
            }
            for (int j = 0; j < cols; ++j) {
                double sr = 0.0, si = 0.0;
                const double* arow = ZtA.data() + static_cast<size_t>(j) * ny;
                const double* wrow = ZtW.data() + static_cast<size_t>(j) * ny;
                (void)wrow;
                for (int i = 0; i < ny; ++i) {
                    sr += arow[i] * dre[i];
                    si += arow[i] * dim[i];
                }
                // k^2 metric part against phi_p
                for (int i = 0; i < ny; ++i) {
                    const double zw = Zm[static_cast<size_t>(i) * cols + j] * Tmet[i] * k * k;
                    sr += zw * pre[i];
                    si += zw * pim[i];
                }
                re[j] -= sr;
                im[j] -= si;
            }
        }

        const size_t blk = static_cast<size_t>(nz) * nz;
        lu_solve_refined(lu.data() + static_cast<size_t>(m) * blk,
                         mats.data() + static_cast<size_t>(m) * blk,
                         piv.data() + static_cast<size_t>(m) * nz, cols, re.data(), im.data());

        for (int i = 0; i < ny; ++i) {
            std::complex<double> s(pre[i], pim[i]);
            const double* zrow = Zm.data() + static_cast<size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) s += zrow[j] * std::complex<double>(re[j], im[j]);
            phi[static_cast<size_t>(i) * nm + m] = s;
        }
    }

    ScalarField out(grid);
    fftw_execute_dft_c2r(gr.plan_c2r(), reinterpret_cast<fftw_complex*>(phi.data()),
                         out.v.data());
    const double inv = 1.0 / nx;
    for (double& x : out.v) x *= inv;
    subtract_mean(out);
    return out;
}

Projector::Projector(GridPtr grid) : grid_(grid), qsolver_(std::make_unique<QSolver>(grid)) {
    harmonic_ = harmonic_basis(grid_);
}

Projector::~Projector() = default;

Decomposition Projector::project_Q(const Pair& p) const {
    if (p.grid().get() != grid_.get()) throw ConfigError("project_Q: grid mismatch");
    Decomposition d;
    d.potential = qsolver_->potential(p.u);
    d.fast.rho = p.rho;
    d.fast.u = gradient(d.potential);
    d.slow.rho = ScalarField(grid_);
    d.slow.u = lincomb(1.0, p.u, -1.0, d.fast.u);
    d.harmonic_coeffs.reserve(harmonic_.size());
    for (const VectorField& h : harmonic_) d.harmonic_coeffs.push_back(inner(d.slow.u, h));
    return d;
}

Decomposition Projector::project_Q(const State& s) const { return project_Q(s.as_pair()); }

Pair Projector::project_P(const Pair& p) const { return project_Q(p).slow; }

Pair Projector::project_P(const State& s) const { return project_Q(s.as_pair()).slow; }

VectorField Projector::leray(const VectorField& a) const {
    if (a.grid.get() != grid_.get()) throw ConfigError("leray: grid mismatch");
    ScalarField phi = qsolver_->potential(a);
    return lincomb(1.0, a, -1.0, gradient(phi));
}

double Projector::verify_Q_bound(const State& s) const {
    Decomposition d = project_Q(s);
    const double nq = sobolev_norm(d.fast, 1);
    const double scale = l2_norm(s.as_pair());
    if (nq <= 1e-12 * std::max(scale, 1e-30))
        return std::numeric_limits<double>::infinity();
    const double lq = l2_norm(apply_L(d.fast));
    if (lq == 0.0) return std::numeric_limits<double>::infinity();
    return nq / lq;
}

}  // namespace machlab
