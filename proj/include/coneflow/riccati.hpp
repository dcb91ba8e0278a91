#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "coneflow/field.hpp"

namespace coneflow {

// Jump measure on the closed orthant minus the origin: finitely many atoms
// plus an optional density with explicit radial truncation and tensor
// quadrature split at |xi| = 1.
struct JumpMeasure {
    struct Atom {
        Vec xi;
        double mass = 0.0;
    };
    std::vector<Atom> atoms;

    struct Density {
        std::function<double(const Vec&)> value;  // nonnegative on C \ {0}
        double r_max = 4.0;
        int nodes_per_axis = 32;
    };
    std::optional<Density> density;

    bool empty() const { return atoms.empty() && !density.has_value(); }
};

// Admissible parameter set of the orthant-valued affine Riccati system:
// f_i(x) = (alpha_i/2) x_i^2 + x.beta^i - c_i
//        + int (e^{x.xi} - 1 - x.xi 1_{|xi|<=1}) mu_i(dxi).
struct AffineParams {
    std::size_t d = 0;
    struct Coordinate {
        double alpha = 0.0;
        Vec beta;
        double c = 0.0;
        JumpMeasure jumps;
    };
    std::vector<Coordinate> coords;
    Norm norm = Norm::Euclidean;  // the |.| used in all jump integrals
};

// Checks the admissibility bullets; Fail names the violated bullet and
// coordinate. Atom integrals are exact sums, density integrals quadrature.
CertReport validate(const AffineParams& params);

// f(x); components may be +inf (defining membership in U = {f finite}).
Vec eval_f(const AffineParams& params, const Vec& x);

// Split form f_dagger + large-jump part (representation identity oracle).
Vec eval_f_split(const AffineParams& params, const Vec& x);

// Wraps eval_f into an autonomous VectorField on the finiteness domain with
// the analytic Jacobian. Throws on validation failure.
VectorField as_vector_field(const AffineParams& params, Norm norm = Norm::Euclidean);

// Closed-form flow of the scalar CIR field f(x) = (alpha/2) x^2 + beta x.
// beta = 0 handled by the pure-quadratic limit formula. Throws when the
// blow-up time is crossed.
double cir_closed_form(double alpha, double beta, double x, double t);

// Convenience: the scalar CIR field as an AffineParams.
AffineParams cir_params(double alpha, double beta);

// Composite audit of the structure proposition: convexity, quasi-
// monotonicity, and order-regularity of U, on the sampler's region.
CertReport check_proposition(const AffineParams& params, const SamplerSpec& sampler,
                             double tol = 1e-7);

}  // namespace coneflow
