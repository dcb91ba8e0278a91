#pragma once

#include "coneflow/flow.hpp"

namespace coneflow {

// Linear variational flow w(t) solving w' = B(t) w, B(t) = f'(t, psi(t,x)),
// w(0) = y, co-integrated with the base trajectory; bound_curve is
// ||y|| exp(int_0^t ||B||) evaluated by per-step quadrature on the dense
// output.
struct LinearFlowResult {
    std::vector<double> times;
    std::vector<Vec> w;
    std::vector<double> bound;
    Trajectory base;       // base trajectory (x-part of the augmented system)
    Trajectory augmented;  // full augmented trajectory [x; w]
    std::size_t dim = 0;

    Vec w_at(double t) const;  // dense w(t) from the augmented interpolant
};

LinearFlowResult variational_solve(const VectorField& field, const Vec& x0, const Vec& y, double t,
                                   int grid_points = 41, const IntegrateOptions& opts = {});

// Sandwich inequality: w^x_{y-x}(t) <= psi(t,y) - psi(t,x) <= w^y_{y-x}(t).
CertReport sandwich_check(const VectorField& field, const Vec& x, const Vec& y, double t,
                          double tol, const IntegrateOptions& opts = {});

// Explicit a priori bound ||psi(t, lx+(1-l)y)|| <= R_K (1 + mu_C e^{L t})
// for trajectories confined to the box K = [klo, khi].
CertReport explicit_bound_check(const VectorField& field, const Vec& x, const Vec& y,
                                double lambda, double t, const Vec& klo, const Vec& khi,
                                double tol, const IntegrateOptions& opts = {});

}  // namespace coneflow
