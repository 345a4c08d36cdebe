#include "machlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "machlab/errors.hpp"

namespace machlab {

namespace {
// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex g_fftw_plan_mutex;
}  // namespace

bool Grid::same_as(const Grid& other) const {
    return kind == other.kind && nx == other.nx && ny == other.ny &&
           length_x == other.length_x && wall_a == other.wall_a && wall_b == other.wall_b;
}

Grid::~Grid() {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    if (plan_r2c_) fftw_destroy_plan(plan_r2c_);
    if (plan_c2r_) fftw_destroy_plan(plan_c2r_);
}

GridPtr make_grid(DomainKind kind, int n_periodic, int n_wall, double extent_a,
                  double extent_b, double dealias_fraction) {
    if (n_periodic < 8 || n_periodic % 2 != 0)
        throw ConfigError("make_grid: n_periodic must be even and >= 8");
    if (n_wall < 9 || n_wall % 2 == 0)
        throw ConfigError("make_grid: n_wall must be odd and >= 9");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw ConfigError("make_grid: dealias_fraction must lie in (0, 1]");

    auto grid = std::shared_ptr<Grid>(new Grid());
    Grid& g = *grid;
    g.kind = kind;
    g.nx = n_periodic;
    g.ny = n_wall;
    g.dealias_fraction = dealias_fraction;

    if (kind == DomainKind::channel) {
        const double lx = extent_a == kDefaultExtent ? 2.0 * M_PI : extent_a;
        const double ly = extent_b == kDefaultExtent ? M_PI : extent_b;
        if (lx <= 0.0 || ly <= 0.0) throw ConfigError("make_grid: channel lengths must be positive");
        g.length_x = lx;
        g.wall_a = 0.0;
        g.wall_b = ly;
    } else {
        const double r0 = extent_a == kDefaultExtent ? 1.0 : extent_a;
        const double r1 = extent_b == kDefaultExtent ? 2.0 : extent_b;
        if (r0 <= 0.0 || r0 >= r1)
            throw ConfigError("make_grid: annulus radii must satisfy 0 < r0 < r1");
        g.length_x = 2.0 * M_PI;
        g.wall_a = r0;
        g.wall_b = r1;
    }

    const int nx = g.nx, ny = g.ny;
    g.xs.resize(nx);
    for (int i = 0; i < nx; ++i) g.xs[i] = g.length_x * i / nx;
    g.wx = g.length_x / nx;

    g.lobatto = make_lobatto(ny);
    const double half = 0.5 * (g.wall_b - g.wall_a);
    g.ys.resize(ny);
    g.wy.resize(ny);
    for (int j = 0; j < ny; ++j) {
        g.ys[j] = g.wall_a + (g.lobatto.nodes[j] + 1.0) * half;
        g.wy[j] = g.lobatto.weights[j] * half;
    }
    g.dy.assign(static_cast<size_t>(ny) * ny, 0.0);
    for (int i = 0; i < ny; ++i)
        for (int j = 0; j < ny; ++j)
            g.dy[static_cast<size_t>(i) * ny + j] = g.lobatto.diff[static_cast<size_t>(i) * ny + j] / half;

    g.jac.resize(ny);
    for (int j = 0; j < ny; ++j) g.jac[j] = (kind == DomainKind::annulus) ? g.ys[j] : 1.0;

    g.wq.resize(g.num_nodes());
    g.area = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double wrow = g.wx * g.wy[j] * g.jac[j];
        for (int i = 0; i < nx; ++i) g.wq[g.node(j, i)] = wrow;
        g.area += wrow * nx;
    }

    const int nmodes = nx / 2 + 1;
    g.kx.resize(nmodes);
    g.keep_x.resize(nmodes);
    const int cut_x = static_cast<int>(std::floor(dealias_fraction * (nx / 2)));
    for (int m = 0; m < nmodes; ++m) {
        g.kx[m] = 2.0 * M_PI * m / g.length_x;
        g.keep_x[m] = (m <= cut_x && m < nx / 2) ? 1 : 0;  // Nyquist always dropped
    }

    double dmin = g.wx * (kind == DomainKind::annulus ? g.wall_a : 1.0);
    for (int j = 0; j + 1 < ny; ++j) dmin = std::min(dmin, g.ys[j + 1] - g.ys[j]);
    g.min_spacing_ = dmin;

    {
        std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
        std::vector<double> rbuf(static_cast<size_t>(ny) * nx, 0.0);
        std::vector<fftw_complex> cbuf(static_cast<size_t>(ny) * nmodes);
        int n[1] = {nx};
        g.plan_r2c_ = fftw_plan_many_dft_r2c(1, n, ny, rbuf.data(), nullptr, 1, nx,
                                             cbuf.data(), nullptr, 1, nmodes,
                                             FFTW_ESTIMATE | FFTW_UNALIGNED);
        g.plan_c2r_ = fftw_plan_many_dft_c2r(1, n, ny, cbuf.data(), nullptr, 1, nmodes,
                                             rbuf.data(), nullptr, 1, nx,
                                             FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!g.plan_r2c_ || !g.plan_c2r_) throw NumericalError("make_grid: FFTW planning failed");
    }
    return grid;
}

}  // namespace machlab
