#pragma once

#include <vector>

namespace machlab {

/// Legendre-Gauss-Lobatto collocation data on the reference interval [-1,1].
///
/// The quadrature rule is exact for polynomials through degree 2n-3, which
/// makes the discrete integration-by-parts identity
///   sum_i w_i (Dp)_i q_i + sum_i w_i p_i (Dq)_i = p(1)q(1) - p(-1)q(-1)
/// hold to round-off for nodal polynomials p, q.
struct Lobatto {
    int n = 0;
    std::vector<double> nodes;     // ascending, includes both endpoints
    std::vector<double> weights;   // quadrature weights
    std::vector<double> diff;      // n x n first-derivative matrix, row-major
    std::vector<double> to_nodal;  // n x n, modal Legendre coefficients -> nodal values
    std::vector<double> to_modal;  // n x n, nodal values -> modal coefficients
};

Lobatto make_lobatto(int n);

/// Legendre polynomial value P_n(x) (used by tests and by make_lobatto).
double legendre_p(int n, double x);

}  // namespace machlab
