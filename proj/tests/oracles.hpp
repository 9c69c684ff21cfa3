#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines; each oracle re-derives its result
// from the model equations by a different method.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

struct Plant {
    double Da = 0.078, gamma = 20.0, B = 8.0, beta = 0.3, x2c0 = 0.0;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline double reaction(double x1, double x2, const Plant& p) {
    return p.Da * (1.0 - x1) * std::exp(x2 * p.gamma / (p.gamma + x2));
}

/// Undisturbed open-loop drift with input u.
inline Vec2 drift(double x1, double x2, double u, const Plant& p) {
    const double r = reaction(x1, x2, p);
    return {-x1 + r, -x2 + p.B * r - p.beta * (x2 - p.x2c0) + p.beta * u};
}

/// Central differences, step h.
inline Mat2 fd_jacobian(double x1, double x2, const Plant& p, double h = 1e-6) {
    const Vec2 a = drift(x1 + h, x2, 0.0, p), b = drift(x1 - h, x2, 0.0, p);
    const Vec2 c = drift(x1, x2 + h, 0.0, p), d = drift(x1, x2 - h, 0.0, p);
    return {{{(a[0] - b[0]) / (2 * h), (c[0] - d[0]) / (2 * h)}, {(a[1] - b[1]) / (2 * h), (c[1] - d[1]) / (2 * h)}}};
}

/// Largest singular value from s1^2 + s2^2 = ||J||_F^2 and s1 s2 = |det J|.
inline double spectral_norm(const Mat2& J) {
    const double fro2 = J[0][0] * J[0][0] + J[0][1] * J[0][1] + J[1][0] * J[1][0] + J[1][1] * J[1][1];
    const double det = std::abs(J[0][0] * J[1][1] - J[0][1] * J[1][0]);
    return 0.5 * (std::sqrt(fro2 + 2.0 * det) + std::sqrt(std::max(0.0, fro2 - 2.0 * det)));
}

/// Spectral-norm maximum of the finite-difference Jacobian on an n x n grid.
inline double dense_grid_max_norm(const Plant& p, double x1lo, double x1hi, double x2lo, double x2hi, int n) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x1 = x1lo + (x1hi - x1lo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double x2 = x2lo + (x2hi - x2lo) * j / (n - 1);
            worst = std::max(worst, spectral_norm(fd_jacobian(x1, x2, p, 1e-5)));
        }
    }
    return worst;
}

/// Steady states with input u, reduced to one dimension: on f1 = 0 the
/// composition is k/(1+k) with k = Da exp(.), leaving a scalar balance in x2.
/// Roots are bracketed on a fine grid and bisected.
inline std::vector<Vec2> equilibria_by_scan(const Plant& p, double u, double x2lo, double x2hi, int n = 400) {
    const auto x1_of = [&](double x2) {
        const double k = p.Da * std::exp(x2 * p.gamma / (p.gamma + x2));
        return k / (1.0 + k);
    };
    const auto g = [&](double x2) { return drift(x1_of(x2), x2, u, p)[1]; };
    std::vector<Vec2> roots;
    double prev_x = x2lo, prev_g = g(x2lo);
    for (int i = 1; i <= n; ++i) {
        const double x = x2lo + (x2hi - x2lo) * i / n;
        const double gx = g(x);
        if (prev_g == 0.0) {
            roots.push_back({x1_of(prev_x), prev_x});
        } else if ((prev_g < 0.0) != (gx < 0.0) && gx != 0.0) {
            double lo = prev_x, hi = x, glo = prev_g;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g(mid);
                if ((gm < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double r = 0.5 * (lo + hi);
            roots.push_back({x1_of(r), r});
        }
        prev_x = x;
        prev_g = gx;
    }
    return roots;
}

/// Input that makes the point on f1 = 0 with temperature x2 a steady state.
inline double equilibrium_input(double x2, const Plant& p) {
    const double k = p.Da * std::exp(x2 * p.gamma / (p.gamma + x2));
    const double x1 = k / (1.0 + k);
    return -drift(x1, x2, 0.0, p)[1] / p.beta;
}

/// ln(1 + z) = 2 atanh(z / (2 + z)), summed as a power series (z > -1).
inline double ln1p_series(double z) {
    const double w = z / (2.0 + z);
    double term = w, sum = 0.0;
    for (int k = 0; k < 400; ++k) {
        sum += term / (2 * k + 1);
        term *= w * w;
        if (std::abs(term) < 1e-30) break;
    }
    return 2.0 * sum;
}

/// Lower bound on the inter-event time, assembled from scalar pieces.
inline double zeno_bound(double x1, double x2, double eps, double L, double beta, double lambda1, double lambda2,
                         double mu) {
    // ||Bbar lambda^T|| for Bbar = (0, beta): the matrix [[0, 0], [beta l1, beta l2]].
    const Mat2 M{{{0.0, 0.0}, {beta * lambda1, beta * lambda2}}};
    const double gain = spectral_norm(M) / std::abs(lambda2 * beta);
    const double growth = L * (1.0 + gain) * std::sqrt(x1 * x1 + x2 * x2) + beta * mu;
    return ln1p_series(L * eps / growth) / L;
}

}  // namespace oracle
