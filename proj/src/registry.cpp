#include "coneflow/registry.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace coneflow {

using nlohmann::json;

namespace {

Norm parse_norm(const std::string& s) {
    if (s == "euclidean") return Norm::Euclidean;
    if (s == "max") return Norm::Max;
    if (s == "sum") return Norm::Sum;
    throw std::invalid_argument("unknown norm: " + s);
}

Vec parse_vec(const json& j) { return j.get<Vec>(); }

DomainSpec parse_domain(const json& j) {
    std::string kind = j.value("kind", "whole");
    if (kind == "whole") return DomainSpec::whole_space();
    if (kind == "upper-bounds") {
        // U = {x : x_i < b_i for all i}; margin = min_i (b_i - x_i)
        Vec b = parse_vec(j.at("b"));
        return DomainSpec::sublevel(
            [b](const Vec& x) {
                double g = -kInf;
                for (std::size_t i = 0; i < b.size(); ++i) g = std::max(g, x[i] - b[i]);
                return g;
            },
            0.0, 1.0);
    }
    throw std::invalid_argument("unknown domain kind: " + kind);
}

}  // namespace

OrderCone parse_cone(const json& j) {
    std::size_t d = j.at("dimension").get<std::size_t>();
    Norm norm = parse_norm(j.value("norm", "euclidean"));
    std::string kind = j.value("kind", "orthant");
    if (kind == "orthant") return OrderCone::orthant(d, norm);
    if (kind == "polyhedral") {
        std::vector<Vec> gens;
        for (const auto& g : j.at("dual_generators")) gens.push_back(parse_vec(g));
        return OrderCone::polyhedral(d, std::move(gens), norm);
    }
    throw std::invalid_argument("unknown cone kind: " + kind);
}

AffineParams parse_affine_params(const json& j, Norm norm) {
    AffineParams p;
    p.d = j.at("d").get<std::size_t>();
    p.norm = norm;
    for (const auto& cj : j.at("coordinates")) {
        AffineParams::Coordinate c;
        c.alpha = cj.value("alpha", 0.0);
        c.beta = cj.contains("beta") ? parse_vec(cj.at("beta")) : Vec(p.d, 0.0);
        c.c = cj.value("c", 0.0);
        if (cj.contains("jumps")) {
            const auto& jj = cj.at("jumps");
            if (jj.contains("atoms"))
                for (const auto& aj : jj.at("atoms"))
                    c.jumps.atoms.push_back(
                        {parse_vec(aj.at("xi")), aj.at("mass").get<double>()});
            if (jj.contains("density")) {
                const auto& dj = jj.at("density");
                std::string family = dj.at("family").get<std::string>();
                JumpMeasure::Density den;
                den.r_max = dj.value("r_max", 4.0);
                den.nodes_per_axis = dj.value("nodes_per_axis", 32);
                if (family == "gamma") {
                    // scale * xi^(shape-1) e^(-rate xi) per axis (product form)
                    double shape = dj.value("shape", 1.0);
                    double rate = dj.value("rate", 1.0);
                    double scale = dj.value("scale", 1.0);
                    den.value = [shape, rate, scale](const Vec& xi) {
                        double v = scale;
                        for (double c : xi) {
                            if (c <= 0.0) return 0.0;
                            v *= std::pow(c, shape - 1.0) * std::exp(-rate * c);
                        }
                        return v;
                    };
                } else {
                    throw std::invalid_argument("unknown density family: " + family);
                }
                c.jumps.density = std::move(den);
            }
        }
        p.coords.push_back(std::move(c));
    }
    return p;
}

VectorField make_field(const std::string& name, const json& config, const OrderCone& cone) {
    VectorField f;
    f.cone = cone;
    f.dim = cone.dimension();
    f.horizon = config.value("horizon", kInf);
    if (config.contains("domain")) f.domain = parse_domain(config.at("domain"));

    if (name == "scalar-riccati") {
        if (f.dim != 1) throw std::invalid_argument("scalar-riccati is one-dimensional");
        f.eval = [](double, const Vec& x) { return Vec{x[0] * x[0]}; };
        f.jacobian = [](double, const Vec& x) {
            Mat j(1, 1);
            j(0, 0) = 2.0 * x[0];
            return j;
        };
        return f;
    }
    if (name == "sin") {
        if (f.dim != 1) throw std::invalid_argument("sin field is one-dimensional");
        f.eval = [](double, const Vec& x) { return Vec{std::sin(x[0])}; };
        f.jacobian = [](double, const Vec& x) {
            Mat j(1, 1);
            j(0, 0) = std::cos(x[0]);
            return j;
        };
        return f;
    }
    if (name == "linear") {
        auto a = std::make_shared<Mat>();
        const auto& mj = config.at("matrix");
        a->rows = mj.size();
        a->cols = mj.at(0).size();
        if (a->rows != f.dim || a->cols != f.dim)
            throw std::invalid_argument("linear field: matrix must be d x d");
        for (const auto& row : mj)
            for (const auto& v : row) a->a.push_back(v.get<double>());
        f.eval = [a](double, const Vec& x) { return matvec(*a, x); };
        f.jacobian = [a](double, const Vec&) { return *a; };
        return f;
    }
    if (name == "constant") {
        Vec v = config.at("value").get<Vec>();
        if (v.size() != f.dim) throw std::invalid_argument("constant field: value dimension");
        f.eval = [v](double, const Vec&) { return v; };
        f.jacobian = [d = f.dim](double, const Vec&) { return Mat(d, d); };
        return f;
    }
    if (name == "affine") {
        AffineParams p = parse_affine_params(config.at("params"), cone.norm_kind());
        VectorField af = as_vector_field(p, cone.norm_kind());
        if (af.dim != f.dim) throw std::invalid_argument("affine field: dimension mismatch");
        return af;
    }
    throw std::invalid_argument("unknown field: " + name);
}

}  // namespace coneflow
