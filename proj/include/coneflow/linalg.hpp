#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace coneflow {

using Vec = std::vector<double>;

struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

enum class Norm { Euclidean, Max, Sum };

inline double vector_norm(const Vec& v, Norm n) {
    double s = 0.0;
    switch (n) {
        case Norm::Euclidean:
            for (double x : v) s += x * x;
            return std::sqrt(s);
        case Norm::Max:
            for (double x : v) s = std::max(s, std::abs(x));
            return s;
        case Norm::Sum:
            for (double x : v) s += std::abs(x);
            return s;
    }
    return s;
}

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline Vec vadd(const Vec& x, const Vec& y) {
    Vec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
}

inline Vec vsub(const Vec& x, const Vec& y) {
    Vec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

inline Vec vscale(double a, const Vec& x) {
    Vec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = a * x[i];
    return z;
}

// z = x + a*y
inline Vec vaxpy(const Vec& x, double a, const Vec& y) {
    Vec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + a * y[i];
    return z;
}

inline Vec lerp(const Vec& x, const Vec& y, double lambda) {
    Vec z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = lambda * x[i] + (1.0 - lambda) * y[i];
    return z;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Induced operator norm. Max norm: max absolute row sum; Sum norm: max
// absolute column sum; Euclidean: power iteration on A^T A (50 iterations).
inline double operator_norm(const Mat& m, Norm n) {
    if (m.rows == 0 || m.cols == 0) return 0.0;
    switch (n) {
        case Norm::Max: {
            double best = 0.0;
            for (std::size_t i = 0; i < m.rows; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < m.cols; ++j) s += std::abs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case Norm::Sum: {
            double best = 0.0;
            for (std::size_t j = 0; j < m.cols; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < m.rows; ++i) s += std::abs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case Norm::Euclidean: {
            // power iteration for the top singular value
            Vec v(m.cols, 1.0 / std::sqrt(double(m.cols)));
            double sigma = 0.0;
            for (int it = 0; it < 50; ++it) {
                Vec u = matvec(m, v);
                // v <- A^T u
                Vec w(m.cols, 0.0);
                for (std::size_t j = 0; j < m.cols; ++j) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < m.rows; ++i) s += m(i, j) * u[i];
                    w[j] = s;
                }
                double nw = vector_norm(w, Norm::Euclidean);
                if (nw == 0.0) return 0.0;
                v = vscale(1.0 / nw, w);
                sigma = std::sqrt(nw);
            }
            return sigma;
        }
    }
    return 0.0;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace coneflow
