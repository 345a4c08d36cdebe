#include "machlab/elliptic.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <cmath>
#include <complex>
#include <cstring>

#include "machlab/errors.hpp"
#include "machlab/ops.hpp"

namespace machlab {

namespace {

// Solve A x = b for two right-hand sides (real and imaginary parts) using the
// stored LU factors, with one pass of iterative refinement against the
// original matrix.
void lu_solve2(const double* lu, const double* mat, const int* piv, int n, double* re,
               double* im) {
    std::vector<double> b(static_cast<size_t>(n) * 2);
    for (int j = 0; j < n; ++j) {
        b[2 * j] = re[j];
        b[2 * j + 1] = im[j];
    }
    std::vector<double> x = b;
    lapack_int info = LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', n, 2, lu, n,
                                     reinterpret_cast<const lapack_int*>(piv), x.data(), 2);
    if (info != 0) throw NumericalError("elliptic: triangular solve failed");

    // refinement: x += A^{-1} (b - A x)
    std::vector<double> r(static_cast<size_t>(n) * 2);
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
    info = LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', n, 2, lu, n,
                          reinterpret_cast<const lapack_int*>(piv), r.data(), 2);
    if (info != 0) throw NumericalError("elliptic: refinement solve failed");
    for (int j = 0; j < n; ++j) {
        re[j] = x[2 * j] + r[2 * j];
        im[j] = x[2 * j + 1] + r[2 * j + 1];
    }
}

}  // namespace

EllipticSolver::EllipticSolver(GridPtr grid, EllipticOperator op, BcKind bc)
    : grid_(std::move(grid)), op_(op), bc_(bc) {
    const Grid& g = *grid_;
    const int ny = g.ny;
    nm_ = g.nx / 2 + 1;
    lu_.assign(static_cast<size_t>(nm_) * ny * ny, 0.0);
    mat_.assign(static_cast<size_t>(nm_) * ny * ny, 0.0);
    piv_.assign(static_cast<size_t>(nm_) * ny, 0);
    pin_row_ = ny / 2;

    // D2 = Dy * Dy
    std::vector<double> d2(static_cast<size_t>(ny) * ny, 0.0);
    for (int i = 0; i < ny; ++i)
        for (int k = 0; k < ny; ++k) {
            const double dik = g.dy[static_cast<size_t>(i) * ny + k];
            if (dik == 0.0) continue;
            for (int j = 0; j < ny; ++j)
                d2[static_cast<size_t>(i) * ny + j] += dik * g.dy[static_cast<size_t>(k) * ny + j];
        }

    for (int m = 0; m < nm_; ++m) {
        double* A = mat_.data() + static_cast<size_t>(m) * ny * ny;
        const double k = g.kx[m];
        for (int i = 0; i < ny; ++i) {
            for (int j = 0; j < ny; ++j) {
                double a = d2[static_cast<size_t>(i) * ny + j];
                if (g.kind == DomainKind::annulus)
                    a += g.dy[static_cast<size_t>(i) * ny + j] / g.ys[i];
                A[static_cast<size_t>(i) * ny + j] = a;
            }
            const double r = (g.kind == DomainKind::annulus) ? g.ys[i] : 1.0;
            double diag = -k * k / (r * r);
            if (op_ == EllipticOperator::helmholtz_minus_one) diag -= 1.0;
            A[static_cast<size_t>(i) * ny + i] += diag;
        }

        // boundary rows (outward normal is -e_wall at the bottom wall)
        for (int j = 0; j < ny; ++j) {
            if (bc_ == BcKind::dirichlet) {
                A[j] = (j == 0) ? 1.0 : 0.0;
                A[static_cast<size_t>(ny - 1) * ny + j] = (j == ny - 1) ? 1.0 : 0.0;
            } else {
                A[j] = -g.dy[j];
                A[static_cast<size_t>(ny - 1) * ny + j] = g.dy[static_cast<size_t>(ny - 1) * ny + j];
            }
        }

        // Neumann Laplacian has the constants in its nullspace at mode zero;
        // pin the weighted mean instead of one interior collocation row.
        if (m == 0 && op_ == EllipticOperator::laplace && bc_ == BcKind::neumann) {
            pinned_mode0_ = true;
            for (int j = 0; j < ny; ++j)
                A[static_cast<size_t>(pin_row_) * ny + j] = g.wy[j] * g.jac[j];
        }

        double* lu = lu_.data() + static_cast<size_t>(m) * ny * ny;
        std::memcpy(lu, A, sizeof(double) * ny * ny);
        lapack_int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, ny, ny, lu, ny,
                                         reinterpret_cast<lapack_int*>(piv_.data() + static_cast<size_t>(m) * ny));
        if (info != 0) throw NumericalError("elliptic: singular mode matrix (mode " + std::to_string(m) + ")");
    }
}

ScalarField EllipticSolver::solve(const ScalarField& rhs) const {
    const std::vector<double> zero(grid_->nx, 0.0);
    return solve(rhs, zero, zero);
}

ScalarField EllipticSolver::solve(const ScalarField& rhs, const std::vector<double>& bc_bottom,
                                  const std::vector<double>& bc_top) const {
    const Grid& g = *grid_;
    if (rhs.grid.get() != &g) throw ConfigError("elliptic solve: rhs lives on another grid");
    if (static_cast<int>(bc_bottom.size()) != g.nx || static_cast<int>(bc_top.size()) != g.nx)
        throw ConfigError("elliptic solve: bc data must hold one value per periodic node");
    const int ny = g.ny, nx = g.nx;

    ScalarField work = rhs;
    double defect = 0.0;
    if (op_ == EllipticOperator::laplace && bc_ == BcKind::neumann) {
        double bint = 0.0;
        for (int i = 0; i < nx; ++i)
            bint += g.wx * (g.jac[0] * bc_bottom[i] + g.jac[ny - 1] * bc_top[i]);
        defect = integral(rhs) - bint;
        double scale = l2_norm(rhs);
        for (int i = 0; i < nx; ++i)
            scale += std::abs(bc_bottom[i]) + std::abs(bc_top[i]);
        if (std::abs(defect) > 1e-10 * std::max(1.0, scale))
            throw CompatibilityError(
                "elliptic solve: Neumann data incompatible with rhs (defect " +
                    std::to_string(defect) + ")",
                defect);
        const double shift = defect / g.area;
        for (double& x : work.v) x -= shift;
    }

    // transform rhs and boundary data to mode space
    std::vector<std::complex<double>> spec(static_cast<size_t>(ny) * nm_);
    fftw_execute_dft_r2c(g.plan_r2c(), work.v.data(), reinterpret_cast<fftw_complex*>(spec.data()));

    std::vector<double> bc_embed(static_cast<size_t>(ny) * nx, 0.0);
    std::memcpy(bc_embed.data(), bc_bottom.data(), sizeof(double) * nx);
    std::memcpy(bc_embed.data() + nx, bc_top.data(), sizeof(double) * nx);
    std::vector<std::complex<double>> bc_spec(static_cast<size_t>(ny) * nm_);
    fftw_execute_dft_r2c(g.plan_r2c(), bc_embed.data(),
                         reinterpret_cast<fftw_complex*>(bc_spec.data()));

    std::vector<double> re(ny), im(ny);
    for (int m = 0; m < nm_; ++m) {
        if (m == nx / 2) {  // Nyquist annihilated throughout
            for (int j = 0; j < ny; ++j) spec[static_cast<size_t>(j) * nm_ + m] = 0.0;
            continue;
        }
        for (int j = 0; j < ny; ++j) {
            re[j] = spec[static_cast<size_t>(j) * nm_ + m].real();
            im[j] = spec[static_cast<size_t>(j) * nm_ + m].imag();
        }
        const std::complex<double> gb = bc_spec[m];
        const std::complex<double> gt = bc_spec[static_cast<size_t>(1) * nm_ + m];
        re[0] = gb.real();
        im[0] = gb.imag();
        re[ny - 1] = gt.real();
        im[ny - 1] = gt.imag();
        if (m == 0 && pinned_mode0_) {
            re[pin_row_] = 0.0;
            im[pin_row_] = 0.0;
        }
        lu_solve2(lu_.data() + static_cast<size_t>(m) * ny * ny,
                  mat_.data() + static_cast<size_t>(m) * ny * ny,
                  piv_.data() + static_cast<size_t>(m) * ny, ny, re.data(), im.data());
        for (int j = 0; j < ny; ++j)
            spec[static_cast<size_t>(j) * nm_ + m] = std::complex<double>(re[j], im[j]);
    }

    ScalarField phi(rhs.grid);
    fftw_execute_dft_c2r(g.plan_c2r(), reinterpret_cast<fftw_complex*>(spec.data()),
                         phi.v.data());
    const double inv = 1.0 / nx;
    for (double& x : phi.v) x *= inv;

    if (pinned_mode0_) subtract_mean(phi);
    if (!all_finite(phi)) throw NumericalError("elliptic solve: non-finite solution");
    return phi;
}

ScalarField solve(const EllipticProblem& problem) {
    EllipticSolver solver(problem.rhs.grid, problem.op, problem.bc);
    std::vector<double> bb = problem.bc_bottom, bt = problem.bc_top;
    if (bb.empty()) bb.assign(problem.rhs.grid->nx, 0.0);
    if (bt.empty()) bt.assign(problem.rhs.grid->nx, 0.0);
    return solver.solve(problem.rhs, bb, bt);
}

std::vector<VectorField> harmonic_basis(const GridPtr& grid) {
    if (grid->kind == DomainKind::channel) {
        // The along-channel translation mode is kept in the slow component by
        // convention; no harmonic field is reported on the channel.
        return {};
    }
    EllipticSolver solver(grid, EllipticOperator::laplace, BcKind::dirichlet);
    ScalarField rhs(grid);
    std::vector<double> bc_bottom(grid->nx, 0.0), bc_top(grid->nx, 1.0);
    ScalarField psi = solver.solve(rhs, bc_bottom, bc_top);
    VectorField h = perp(gradient(psi));
    // orient with positive mean swirl, normalize in the weighted L2 product
    double swirl = 0.0;
    for (int n = 0; n < grid->num_nodes(); ++n) swirl += grid->wq[n] * h.c2[n];
    if (swirl < 0.0) scale(h, -1.0);
    const double nrm = l2_norm(h);
    if (nrm <= 0.0) throw NumericalError("harmonic_basis: degenerate stream function");
    scale(h, 1.0 / nrm);
    return {h};
}

}  // namespace machlab
