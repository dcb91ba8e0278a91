#pragma once

#include "coneflow/field.hpp"

namespace coneflow {

// Sampled audit of convexity of f(t,.) in the cone order: for Halton-drawn
// (t, x, y, lambda) checks f(t, lx+(1-l)y) <= l f(t,x) + (1-l) f(t,y), plus
// the gradient inequality f'(t,x)(y-x) <= f(t,y) - f(t,x) when a Jacobian is
// available. Pass is "no violation found at N samples", never a proof.
CertReport check_convexity(const VectorField& field, const SamplerSpec& sampler, double tol);

// Sampled audit of quasi-monotonicity: x <= y, l(x) = l(y), l in C* must give
// l(f(t,x)) <= l(f(t,y)); Jacobian mode additionally checks l(f'(t,x)h) >= 0
// for h in C with l(h) = 0.
CertReport check_quasimonotone(const VectorField& field, const SamplerSpec& sampler, double tol);

// Sampled lower estimate of the local Lipschitz constant L_{t,K}(f) on a
// compact box K = [lo, hi]: with a Jacobian, max induced operator norm of
// f'(tau, x) over a grid of [0,t] x K; otherwise max difference quotient.
double lipschitz_estimate(const VectorField& field, double t, const Vec& lo, const Vec& hi,
                          int grid_per_axis = 15, int time_points = 5);

// Checks a supplied Jacobian against central finite differences at sampled
// interior points (relative tolerance).
CertReport validate_jacobian(const VectorField& field, const SamplerSpec& sampler,
                             double rel_tol = 1e-5);

}  // namespace coneflow
