#include "coneflow/mollify.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace coneflow {

namespace {

struct Tensor {
    std::vector<Vec> nodes;          // points in the unit max-norm ball
    std::vector<double> weights;     // renormalized to sum to 1
    double raw_mass = 0.0;           // discrete mass before renormalization
};

Tensor build_tensor(int n, std::size_t d) {
    QuadRule q = gauss_legendre(n);
    std::vector<double> w1(n);
    for (int i = 0; i < n; ++i) w1[i] = q.weights[i] * bump_density(q.nodes[i]);
    Tensor t;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= std::size_t(n);
    t.nodes.reserve(total);
    t.weights.reserve(total);
    double mass = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        Vec s(d);
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            std::size_t k = rem % n;
            rem /= n;
            s[i] = q.nodes[k];
            w *= w1[k];
        }
        t.nodes.push_back(std::move(s));
        t.weights.push_back(w);
        mass += w;
    }
    t.raw_mass = mass;
    for (double& w : t.weights) w /= mass;
    return t;
}

}  // namespace

double mollifier_mass_defect(int nodes_per_axis, std::size_t dim) {
    Tensor t = build_tensor(nodes_per_axis, dim);
    return std::abs(t.raw_mass - 1.0);
}

VectorField mollify(const VectorField& field, double epsilon, MollifySpec spec) {
    if (epsilon <= 0.0) throw std::invalid_argument("mollify: epsilon must be > 0");
    if (spec.nodes_per_axis < 3) throw std::invalid_argument("mollify: need at least 3 nodes");
    const std::size_t d = field.dim;
    auto tensor = std::make_shared<Tensor>(build_tensor(spec.nodes_per_axis, d));

    // Kernel support is the unit max-norm ball; the shrink amount is scaled
    // by the norm of the all-ones vector so every evaluation stays inside U
    // regardless of which norm the margin is measured in.
    double ones_norm = vector_norm(Vec(d, 1.0), field.cone.norm_kind());
    VectorField out;
    out.dim = d;
    out.horizon = field.horizon;
    out.cone = field.cone;
    out.domain = field.domain.shrink(epsilon * ones_norm);

    auto base_eval = field.eval;
    out.eval = [base_eval, tensor, epsilon, d](double t, const Vec& x) {
        Vec acc(d, 0.0);
        for (std::size_t i = 0; i < tensor->nodes.size(); ++i) {
            Vec xi = x;
            for (std::size_t k = 0; k < d; ++k) xi[k] -= epsilon * tensor->nodes[i][k];
            Vec fv = base_eval(t, xi);
            for (std::size_t k = 0; k < d; ++k) acc[k] += tensor->weights[i] * fv[k];
        }
        return acc;
    };
    if (field.has_jacobian()) {
        auto base_jac = field.jacobian;
        out.jacobian = [base_jac, tensor, epsilon, d](double t, const Vec& x) {
            Mat acc(d, d);
            for (std::size_t i = 0; i < tensor->nodes.size(); ++i) {
                Vec xi = x;
                for (std::size_t k = 0; k < d; ++k) xi[k] -= epsilon * tensor->nodes[i][k];
                Mat j = base_jac(t, xi);
                for (std::size_t k = 0; k < acc.a.size(); ++k) acc.a[k] += tensor->weights[i] * j.a[k];
            }
            return acc;
        };
    }
    return out;
}

}  // namespace coneflow
