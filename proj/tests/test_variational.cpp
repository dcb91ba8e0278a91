#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "coneflow/registry.hpp"
#include "coneflow/riccati.hpp"
#include "coneflow/variational.hpp"

using namespace coneflow;

namespace {

VectorField scalar_riccati() {
    return make_field("scalar-riccati", nlohmann::json::object(), OrderCone::orthant(1));
}

// closed forms for f = x^2: psi(t,x) = x/(1-tx), w^x_y(t) = y/(1-tx)^2
double riccati_flow(double t, double x) { return x / (1.0 - t * x); }
double riccati_variational(double t, double x, double y) {
    double d = 1.0 - t * x;
    return y / (d * d);
}

}  // namespace

TEST_CASE("variational_solve: scalar Riccati closed form") {
    VectorField f = scalar_riccati();
    LinearFlowResult r = variational_solve(f, {1.0}, {1.0}, 0.2);
    CHECK(r.w_at(0.2)[0] == doctest::Approx(1.5625).epsilon(1e-8));
    CHECK(r.w.back()[0] == doctest::Approx(riccati_variational(0.2, 1.0, 1.0)).epsilon(1e-8));
    // base trajectory is the usual flow
    CHECK(r.base.eval(0.2)[0] == doctest::Approx(riccati_flow(0.2, 1.0)).epsilon(1e-9));
}

TEST_CASE("variational_solve: zero direction stays zero") {
    VectorField f = scalar_riccati();
    LinearFlowResult r = variational_solve(f, {1.0}, {0.0}, 0.3);
    for (const Vec& w : r.w) CHECK(std::abs(w[0]) < 1e-12);
}

TEST_CASE("variational_solve: linear field reproduces the perturbed flow exactly") {
    nlohmann::json cfg;
    cfg["matrix"] = {{0.5, 1.0}, {0.2, -0.3}};
    VectorField f = make_field("linear", cfg, OrderCone::orthant(2));
    Vec x0 = {1.0, 2.0}, y = {0.5, -1.0};
    LinearFlowResult r = variational_solve(f, x0, y, 1.0);
    // for f = Ax the flow is affine: w(t) = psi(t, x0+y) - psi(t, x0)
    Vec a = integrate(f, vadd(x0, y), 1.0).eval(1.0);
    Vec b = integrate(f, x0, 1.0).eval(1.0);
    Vec w = r.w_at(1.0);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(w[i] == doctest::Approx(a[i] - b[i]).epsilon(1e-8));
}

TEST_CASE("linearity in the initial direction") {
    VectorField f = scalar_riccati();
    LinearFlowResult one = variational_solve(f, {1.0}, {1.0}, 0.2);
    LinearFlowResult two = variational_solve(f, {1.0}, {2.0}, 0.2);
    for (std::size_t i = 0; i < one.times.size(); ++i) {
        CHECK(two.w[i][0] == doctest::Approx(2.0 * one.w[i][0]).epsilon(1e-10));
    }
}

TEST_CASE("Eq. (w): norm of w stays below the exponential bound") {
    VectorField f = scalar_riccati();
    for (double x0 : {0.5, 1.0, -1.0}) {
        LinearFlowResult r = variational_solve(f, {x0}, {1.0}, 0.3);
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            CHECK(f.cone.norm_of(r.w[i]) <= r.bound[i] * (1.0 + 1e-7));
        }
    }

    nlohmann::json cfg;
    cfg["matrix"] = {{0.1, 0.8}, {0.4, -0.6}};
    VectorField lin = make_field("linear", cfg, OrderCone::orthant(2));
    LinearFlowResult r = variational_solve(lin, {1.0, 1.0}, {1.0, -0.5}, 1.0);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        CHECK(lin.cone.norm_of(r.w[i]) <= r.bound[i] * (1.0 + 1e-7));
    }
}

TEST_CASE("w is the directional derivative of the flow") {
    VectorField f = scalar_riccati();
    const double t = 0.2;
    Vec x0 = {1.0}, y = {1.0};
    double w = variational_solve(f, x0, y, t).w_at(t)[0];
    double base = integrate(f, x0, t).eval(t)[0];
    double prev_err = kInf;
    for (double h : {1e-4, 1e-5}) {
        double fd = (integrate(f, {x0[0] + h * y[0]}, t).eval(t)[0] - base) / h;
        double err = std::abs(fd - w);
        CHECK(err < prev_err);  // first-order decrease in h
        CHECK(err < 10.0 * h);
        prev_err = err;
    }
}

TEST_CASE("sandwich_check: scalar Riccati closed-form case") {
    VectorField f = scalar_riccati();
    CHECK(sandwich_check(f, {1.0}, {3.0}, 0.2, 1e-7).verdict == Verdict::Pass);
    // the three sandwich terms by closed form: 3.125 <= 6.25 <= 12.5
    double wl = riccati_variational(0.2, 1.0, 2.0);
    double df = riccati_flow(0.2, 3.0) - riccati_flow(0.2, 1.0);
    double wu = riccati_variational(0.2, 3.0, 2.0);
    CHECK(wl == doctest::Approx(3.125).epsilon(1e-12));
    CHECK(df == doctest::Approx(6.25).epsilon(1e-12));
    CHECK(wu == doctest::Approx(12.5).epsilon(1e-12));

    // degenerate segment: all three terms vanish
    CHECK(sandwich_check(f, {1.0}, {1.0}, 0.2, 1e-9).verdict == Verdict::Pass);
}

TEST_CASE("sandwich_check: linear fields give equality") {
    nlohmann::json cfg;
    cfg["matrix"] = {{0.0, 1.0}, {1.0, 0.5}};
    VectorField f = make_field("linear", cfg, OrderCone::orthant(2));
    CHECK(sandwich_check(f, {1.0, 0.0}, {2.0, 1.0}, 0.8, 1e-8).verdict == Verdict::Pass);
    // both sandwich inequalities also hold reversed (equality)
    Vec x = {1.0, 0.0}, y = {2.0, 1.0};
    LinearFlowResult r = variational_solve(f, x, vsub(y, x), 0.8);
    Vec diff = vsub(integrate(f, y, 0.8).eval(0.8), integrate(f, x, 0.8).eval(0.8));
    Vec w = r.w_at(0.8);
    CHECK(f.cone.leq(diff, w, 1e-8));
    CHECK(f.cone.leq(w, diff, 1e-8));
}

TEST_CASE("sandwich (a7) holds on 100 seeded triples of the scalar Riccati and CIR") {
    VectorField sq = scalar_riccati();
    AffineParams cir = cir_params(1.0, -0.5);
    VectorField cf = as_vector_field(cir, Norm::Euclidean);
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> ux(-2.0, 0.8);
    std::uniform_real_distribution<double> ut(0.05, 0.4);
    int done = 0;
    while (done < 100) {
        double a = ux(rng), b = ux(rng), t = ut(rng);
        if (a > b) std::swap(a, b);
        if (b > 0.0 && t > 0.9 / b) continue;  // keep clear of blow-up
        const VectorField& f = (done % 2 == 0) ? sq : cf;
        CHECK(sandwich_check(f, {a}, {b}, t, 1e-6).verdict == Verdict::Pass);
        ++done;
    }
}

TEST_CASE("sandwich_check preconditions") {
    VectorField f = scalar_riccati();
    VectorField nojac = f;
    nojac.jacobian = nullptr;
    CHECK_THROWS_AS(sandwich_check(nojac, {1.0}, {2.0}, 0.2, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(sandwich_check(f, {1.0}, {3.0}, 0.5, 1e-7), std::invalid_argument);
}

TEST_CASE("explicit_bound_check: scalar Riccati on K = [0, 0.5]") {
    VectorField f = scalar_riccati();
    CertReport rep = explicit_bound_check(f, {0.1}, {0.3}, 0.5, 1.0, {0.0}, {0.5}, 1e-7);
    CHECK(rep.verdict == Verdict::Pass);
    // oracle values: R_K = 0.5, mu_C = 1, L = 1.0, bound = 0.5 (1 + e)
    double bound = 0.5 * (1.0 + std::exp(1.0));
    CHECK(bound == doctest::Approx(1.8591409142295225).epsilon(1e-12));
    double z = riccati_flow(1.0, 0.2);
    CHECK(z == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(z <= bound);

    // lambda = 0: trajectory confined to K, norm below R_K <= bound
    CHECK(explicit_bound_check(f, {0.1}, {0.3}, 0.0, 1.0, {0.0}, {0.5}, 1e-7).verdict ==
          Verdict::Pass);
}

TEST_CASE("explicit_bound_check: zero field and containment errors") {
    nlohmann::json cfg;
    cfg["value"] = {0.0, 0.0};
    VectorField z = make_field("constant", cfg, OrderCone::orthant(2));
    CHECK(explicit_bound_check(z, {0.2, 0.1}, {0.4, 0.3}, 0.5, 1.0, {0.0, 0.0}, {1.0, 1.0}, 1e-9)
              .verdict == Verdict::Pass);

    VectorField f = scalar_riccati();
    // trajectory from 0.3 leaves K = [0, 0.35] before t = 1
    CHECK_THROWS_AS(explicit_bound_check(f, {0.1}, {0.3}, 0.5, 1.0, {0.0}, {0.35}, 1e-7),
                    std::invalid_argument);
}
