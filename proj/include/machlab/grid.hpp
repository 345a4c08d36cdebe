#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "machlab/legendre.hpp"

struct fftw_plan_s;

namespace machlab {

enum class DomainKind { channel, annulus };

/// Tensor-product collocation grid: trigonometric in the periodic direction
/// (x on the channel, theta on the annulus), Legendre-Gauss-Lobatto in the
/// wall-normal direction (y, resp. r). Immutable after construction.
class Grid {
  public:
    DomainKind kind;
    int nx;  // periodic direction, even, >= 8
    int ny;  // wall-normal direction, odd, >= 9

    double length_x;        // Lx on the channel, 2*pi on the annulus
    double wall_a, wall_b;  // y in [0, Ly] or r in [r0, r1]
    double dealias_fraction;

    std::vector<double> xs;   // periodic coordinates (uniform)
    std::vector<double> ys;   // wall-normal coordinates (ascending GLL)
    double wx;                // uniform quadrature weight, length_x / nx
    std::vector<double> wy;   // GLL weights mapped to [wall_a, wall_b]
    std::vector<double> jac;  // 1 on the channel, r on the annulus (per wall node)
    std::vector<double> wq;   // combined per-node area weight, wx * wy * jac
    double area;              // |Omega|

    std::vector<double> dy;  // ny x ny wall-normal derivative matrix, row-major
    Lobatto lobatto;         // reference-interval data incl. modal transforms

    std::vector<double> kx;       // wavenumber of r2c mode j, j = 0..nx/2
    std::vector<uint8_t> keep_x;  // dealias mask per r2c mode (periodic direction)

    int num_nodes() const { return nx * ny; }
    int node(int iy, int ix) const { return iy * nx + ix; }
    double min_spacing() const { return min_spacing_; }
    bool same_as(const Grid& other) const;

    // FFTW plans for transforming all ny rows at once (new-array execution;
    // safe to share across threads as long as buffers are distinct).
    fftw_plan_s* plan_r2c() const { return plan_r2c_; }
    fftw_plan_s* plan_c2r() const { return plan_c2r_; }

    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

  private:
    Grid() = default;
    friend std::shared_ptr<const Grid> make_grid(DomainKind, int, int, double, double, double);
    double min_spacing_ = 0.0;
    fftw_plan_s* plan_r2c_ = nullptr;
    fftw_plan_s* plan_c2r_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

constexpr double kDefaultExtent = -1.0;

/// Channel: extents (a, b) = (Lx, Ly), defaults (2*pi, pi).
/// Annulus: (a, b) = (r0, r1), defaults (1, 2).
/// Throws ConfigError on invalid extents or resolutions.
GridPtr make_grid(DomainKind kind, int n_periodic, int n_wall, double extent_a = kDefaultExtent,
                  double extent_b = kDefaultExtent, double dealias_fraction = 2.0 / 3.0);

struct ScalarField {
    GridPtr grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(GridPtr g) : grid(std::move(g)), v(grid->num_nodes(), 0.0) {}
    double& operator()(int iy, int ix) { return v[grid->node(iy, ix)]; }
    double operator()(int iy, int ix) const { return v[grid->node(iy, ix)]; }
};

/// Components are Cartesian (u, v) on the channel and cylindrical (u_r,
/// u_theta) on the annulus.
struct VectorField {
    GridPtr grid;
    std::vector<double> c1, c2;

    VectorField() = default;
    explicit VectorField(GridPtr g)
        : grid(std::move(g)), c1(grid->num_nodes(), 0.0), c2(grid->num_nodes(), 0.0) {}
};

}  // namespace machlab
