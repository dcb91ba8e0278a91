#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace coneflow {

struct QuadRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule on (-1,1) by Newton iteration on P_n.
inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    QuadRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.nodes[i] = -x;
        q.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        q.weights[i] = w;
        q.weights[n - 1 - i] = w;
    }
    return q;
}

// Rule mapped to (a, b); weights sum to b-a.
inline QuadRule gauss_legendre_on(int n, double a, double b) {
    QuadRule q = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = 0.5 * (a + b) + 0.5 * (b - a) * q.nodes[i];
        q.weights[i] *= 0.5 * (b - a);
    }
    return q;
}

// The 1D bump kernel exp(-1/(1-s^2)) on (-1,1), zero outside.
inline double bump_raw(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

// Integral of the raw bump over (-1,1), high-accuracy reference.
inline double bump_raw_mass(int n = 400) {
    QuadRule q = gauss_legendre(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += q.weights[i] * bump_raw(q.nodes[i]);
    return s;
}

// Normalized 1D mollifier density rho_1.
inline double bump_density(double s) {
    static const double mass = bump_raw_mass();
    return bump_raw(s) / mass;
}

// Second moment of rho_1 (used as an oracle for mollified quadratics).
inline double bump_second_moment(int n = 400) {
    QuadRule q = gauss_legendre(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += q.weights[i] * q.nodes[i] * q.nodes[i] * bump_density(q.nodes[i]);
    return s;
}

}  // namespace coneflow
