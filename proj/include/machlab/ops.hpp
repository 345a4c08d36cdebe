#pragma once

#include "machlab/grid.hpp"

namespace machlab {

// ---- spectral derivatives (periodic direction via FFT, wall-normal via the
// ---- GLL differentiation matrix). Raw coordinate derivatives:
ScalarField ddx(const ScalarField& f);  // d/dx, resp. d/dtheta
ScalarField ddy(const ScalarField& f);  // d/dy, resp. d/dr

// ---- differential operators with the domain metric folded in
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField curl2d(const VectorField& v);
VectorField perp(const VectorField& v);  // (-v2, v1)

/// (a . grad) b including curvature terms on the annulus.
/// Products are passed through the 2/3-rule mask when dealias is set.
VectorField advect(const VectorField& a, const VectorField& b, bool dealias = true);
/// a . grad(f), dealiased products.
ScalarField advect_scalar(const VectorField& a, const ScalarField& f, bool dealias = true);

// ---- dealiasing (2/3-rule mask in the periodic direction; the wall-normal
// ---- direction relies on collocation resolution)
void dealias_inplace(ScalarField& f);
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);
/// Nodal product a*b followed by the dealias mask (mask skipped if dealias is false).
ScalarField dprod(const ScalarField& a, const ScalarField& b, bool dealias = true);

// ---- quadrature and norms
double integral(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& v);
double mean(const ScalarField& f);
void subtract_mean(ScalarField& f);

/// sqrt(sum_{|beta| <= s} ||d^beta f||^2_{L2}), s in {0,1,2,3}.
/// Derivatives are the covariant components (d/dx, d/dy) on the channel and
/// ((1/r) d/dtheta, d/dr) on the annulus, applied periodic-first.
double sobolev_norm(const ScalarField& f, int s);
double sobolev_norm(const VectorField& v, int s);

// ---- wall helpers
/// Outward wall-normal component u.n at the two walls (size nx each).
void wall_normal(const VectorField& v, std::vector<double>& bottom, std::vector<double>& top);
/// Largest |u.n| over all wall nodes.
double max_wall_normal(const VectorField& v);
/// Nodally zero the wall-normal component; returns the largest correction made.
double zero_wall_normal(VectorField& v);

// ---- field arithmetic
ScalarField zeros_like(const GridPtr& g);
void axpy(double a, const ScalarField& x, ScalarField& y);  // y += a*x
void axpy(double a, const VectorField& x, VectorField& y);
void scale(ScalarField& f, double a);
void scale(VectorField& v, double a);
ScalarField lincomb(double a, const ScalarField& x, double b, const ScalarField& y);
VectorField lincomb(double a, const VectorField& x, double b, const VectorField& y);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& v);

}  // namespace machlab
