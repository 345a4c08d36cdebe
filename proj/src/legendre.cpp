#include "machlab/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace machlab {

namespace {

// Returns {P_n(x), P_n'(x)} by the three-term recurrence.
struct PVal {
    double p;
    double dp;
};

PVal eval_legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // derivative via (x^2-1) P_n' = n (x P_n - P_{n-1})
    const double denom = x * x - 1.0;
    double dp;
    if (std::abs(denom) > 1e-14) {
        dp = n * (x * p1 - p0) / denom;
    } else {
        dp = 0.5 * n * (n + 1.0);  // |P_n'(+-1)|
        if (x < 0.0 && n % 2 == 0) dp = -dp;
    }
    return {p1, dp};
}

}  // namespace

double legendre_p(int n, double x) { return eval_legendre(n, x).p; }

Lobatto make_lobatto(int n) {
    if (n < 2) throw std::invalid_argument("make_lobatto: need n >= 2");
    const int N = n - 1;  // polynomial order

    Lobatto lob;
    lob.n = n;
    lob.nodes.assign(n, 0.0);
    lob.weights.assign(n, 0.0);
    lob.nodes[0] = -1.0;
    lob.nodes[n - 1] = 1.0;

    // Interior nodes: roots of P_N', Newton from Chebyshev-Lobatto guesses.
    // P_N'' comes from the Legendre ODE (1-x^2) P'' = 2x P' - N(N+1) P.
    for (int j = 1; j <= N - 1; ++j) {
        double x = -std::cos(M_PI * j / N);
        for (int it = 0; it < 100; ++it) {
            const PVal v = eval_legendre(N, x);
            const double f = v.dp;
            const double df = (2.0 * x * v.dp - N * (N + 1.0) * v.p) / (1.0 - x * x);
            const double dx = f / df;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        lob.nodes[j] = x;
    }
    // enforce symmetry exactly
    for (int j = 0; j < n / 2; ++j) {
        const double s = 0.5 * (lob.nodes[j] - lob.nodes[n - 1 - j]);
        lob.nodes[j] = s;
        lob.nodes[n - 1 - j] = -s;
    }
    if (n % 2 == 1) lob.nodes[n / 2] = 0.0;

    // weights w_j = 2 / (N(N+1) P_N(x_j)^2)
    for (int j = 0; j < n; ++j) {
        const double pn = legendre_p(N, lob.nodes[j]);
        lob.weights[j] = 2.0 / (N * (N + 1.0) * pn * pn);
    }

    // Barycentric weights, scaled to avoid under/overflow; only ratios matter.
    std::vector<double> bary(n, 1.0);
    for (int j = 0; j < n; ++j) {
        double logc = 0.0;
        int sign = 1;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double d = lob.nodes[j] - lob.nodes[k];
            logc -= std::log(std::abs(d));
            if (d < 0.0) sign = -sign;
        }
        bary[j] = sign * std::exp(logc / 1.0);
        if (!std::isfinite(bary[j])) throw std::runtime_error("make_lobatto: barycentric overflow");
    }
    double bmax = 0.0;
    for (double c : bary) bmax = std::max(bmax, std::abs(c));
    for (double& c : bary) c /= bmax;

    lob.diff.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = (bary[j] / bary[i]) / (lob.nodes[i] - lob.nodes[j]);
            lob.diff[static_cast<size_t>(i) * n + j] = d;
            rowsum += d;
        }
        lob.diff[static_cast<size_t>(i) * n + i] = -rowsum;  // exact derivative of constants
    }

    // Modal transforms. gamma_j = ||P_j||^2 under the GLL rule: 2/(2j+1) for
    // j < N and 2/N for the top degree.
    lob.to_nodal.assign(static_cast<size_t>(n) * n, 0.0);
    lob.to_modal.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            lob.to_nodal[static_cast<size_t>(i) * n + j] = legendre_p(j, lob.nodes[i]);
    for (int j = 0; j < n; ++j) {
        const double gamma = (j < N) ? 2.0 / (2.0 * j + 1.0) : 2.0 / N;
        for (int i = 0; i < n; ++i) {
            lob.to_modal[static_cast<size_t>(j) * n + i] =
                lob.weights[i] * legendre_p(j, lob.nodes[i]) / gamma;
        }
    }
    return lob;
}

}  // namespace machlab
