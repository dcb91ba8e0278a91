#pragma once

#include <functional>
#include <vector>

#include "coneflow/field.hpp"

namespace coneflow {

struct IntegrateOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    long max_steps = 2000000;
    double escape_margin = 1e-9;   // margin threshold treated as "at the boundary"
    double overflow_guard = 1e150;  // state beyond this counts as blow-up
};

enum class TrajStatus { ReachedTarget, EscapedDomain, HorizonReached, StepCollapse };

// Dense-output solution of the initial value problem on [0, t_end].
class Trajectory {
public:
    Vec x0;
    double t_end = 0.0;
    TrajStatus status = TrajStatus::ReachedTarget;
    double theta_lo = kInf, theta_hi = kInf;  // escape-time bracket when applicable

    struct Step {
        double t0 = 0.0, h = 0.0;
        Vec r1, r2, r3, r4, r5;  // order-4 continuous extension coefficients
    };
    std::vector<Step> steps;

    struct Stats {
        long accepted = 0, rejected = 0, rhs_evals = 0;
    } stats;

    Vec eval(double t) const;   // dense output (clamped to [0, t_end])
    Vec deriv(double t) const;  // derivative of the interpolant
};

Trajectory integrate(const VectorField& field, const Vec& x0, double t_target,
                     const IntegrateOptions& opts = {});

struct EscapeBracket {
    double lo = 0.0, hi = 0.0;
    bool global = false;  // solution survived to the requested horizon
};

// Escape-time bracket for the maximal solution from x0. t_max bounds the
// search (defaults to the field horizon, or 100 when the horizon is
// infinite); a solution surviving to t_max reports {t_max, t_max, global}.
EscapeBracket escape_time(const VectorField& field, const Vec& x0,
                          const IntegrateOptions& opts = {}, double t_max = -1.0);

// x0 in D_f(t), i.e. the maximal solution survives past t.
bool in_domain_D(const VectorField& field, const Vec& x0, double t,
                 const IntegrateOptions& opts = {});

// Theorem-level checks --------------------------------------------------

// psi(t, lx+(1-l)y) <= l psi(t,x) + (1-l) psi(t,y) for each lambda, plus
// membership of the combination in D_f(t).
CertReport flow_convexity_check(const VectorField& field, const Vec& x, const Vec& y,
                                const std::vector<double>& lambdas, double t, double tol,
                                const IntegrateOptions& opts = {});

// theta(z) >= min(theta(x), theta(y)) - time_tol along the segment.
CertReport domain_convexity_check(const VectorField& field, const Vec& x, const Vec& y,
                                  const std::vector<double>& lambdas, double time_tol = 1e-6,
                                  const IntegrateOptions& opts = {}, double t_max = -1.0);

// Comparison lemma: if defect(lower) <= defect(upper) on the grid and
// lower(0) <= upper(0), then lower(t) <= upper(t). Defects by 4th-order
// finite differences on the (uniform) grid; premise failure is reported as
// Inconclusive, never Fail.
using Curve = std::function<Vec(double)>;
CertReport comparison_check(const VectorField& field, const Curve& lower, const Curve& upper,
                            const std::vector<double>& grid, double tol,
                            double premise_tol = 1e-6);

// The sub/supersolution route to flow convexity: integrates the three
// solutions independently and checks the combination inequality at t.
CertReport subsuper_convexity_check(const VectorField& field, const Vec& x1_0, const Vec& x2_0,
                                    double lambda, double t, double tol,
                                    const IntegrateOptions& opts = {});

// ||psi(s+t,x0) - psi(t, psi(s,x0))|| <= tol (1 + ||psi(s+t,x0)||) for an
// autonomous field (integration-accuracy audit).
CertReport semigroup_check(const VectorField& field, const Vec& x0, double s, double t, double tol,
                           const IntegrateOptions& opts = {});

// CSV dump: header t,x_1,...,x_d; one row per accepted step plus dense
// samples at `extra_samples` uniform grid points when > 0.
void write_trajectory_csv(const Trajectory& traj, std::size_t dim, const std::string& path,
                          int extra_samples = 0);

}  // namespace coneflow
