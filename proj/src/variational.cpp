#include "coneflow/variational.hpp"

#include <cmath>
#include <stdexcept>

#include "coneflow/certify.hpp"
#include "coneflow/quad.hpp"

namespace coneflow {

namespace {

// Augmented field [x; w] with x' = f(t,x), w' = f'(t,x) w; domain checked on
// the x-part only.
VectorField augment(const VectorField& field) {
    const std::size_t d = field.dim;
    VectorField aug;
    aug.dim = 2 * d;
    aug.horizon = field.horizon;
    aug.cone = OrderCone::orthant(2 * d, field.cone.norm_kind());
    auto base_eval = field.eval;
    auto base_jac = field.jacobian;
    aug.eval = [base_eval, base_jac, d](double t, const Vec& z) {
        Vec x(z.begin(), z.begin() + d);
        Vec w(z.begin() + d, z.end());
        Vec fx = base_eval(t, x);
        Vec out(2 * d);
        if (!all_finite(fx)) {
            for (auto& v : out) v = kInf;
            return out;
        }
        Vec bw = matvec(base_jac(t, x), w);
        for (std::size_t i = 0; i < d; ++i) {
            out[i] = fx[i];
            out[d + i] = bw[i];
        }
        return out;
    };
    aug.domain = DomainSpec::project_head(field.domain, d);
    return aug;
}

Trajectory project_base(const Trajectory& aug, std::size_t d) {
    Trajectory base;
    base.x0 = Vec(aug.x0.begin(), aug.x0.begin() + d);
    base.t_end = aug.t_end;
    base.status = aug.status;
    base.theta_lo = aug.theta_lo;
    base.theta_hi = aug.theta_hi;
    base.stats = aug.stats;
    auto head = [d](const Vec& v) { return Vec(v.begin(), v.begin() + d); };
    for (const auto& s : aug.steps) {
        Trajectory::Step p;
        p.t0 = s.t0;
        p.h = s.h;
        p.r1 = head(s.r1);
        p.r2 = head(s.r2);
        p.r3 = head(s.r3);
        p.r4 = head(s.r4);
        p.r5 = head(s.r5);
        base.steps.push_back(std::move(p));
    }
    return base;
}

}  // namespace

Vec LinearFlowResult::w_at(double t) const {
    Vec z = augmented.eval(t);
    return Vec(z.begin() + dim, z.end());
}

LinearFlowResult variational_solve(const VectorField& field, const Vec& x0, const Vec& y, double t,
                                   int grid_points, const IntegrateOptions& opts) {
    if (!field.has_jacobian())
        throw std::invalid_argument("variational_solve: field has no jacobian");
    if (x0.size() != field.dim || y.size() != field.dim)
        throw std::invalid_argument("variational_solve: dimension mismatch");
    const std::size_t d = field.dim;
    VectorField aug = augment(field);
    Vec z0(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
        z0[i] = x0[i];
        z0[d + i] = y[i];
    }
    Trajectory taug = integrate(aug, z0, t, opts);
    if (taug.status != TrajStatus::ReachedTarget)
        throw std::invalid_argument("variational_solve: base trajectory escapes before t");

    LinearFlowResult res;
    res.dim = d;
    res.augmented = taug;
    res.base = project_base(taug, d);

    // cumulative int ||B|| by per-step Gauss-Legendre on the dense base output
    const Norm nk = field.cone.norm_kind();
    auto bnorm = [&](double tau) {
        Vec x = res.base.eval(tau);
        return operator_norm(field.jacobian(tau, x), nk);
    };
    static const QuadRule gl = gauss_legendre(7);
    std::vector<double> cum(res.base.steps.size() + 1, 0.0);
    for (std::size_t i = 0; i < res.base.steps.size(); ++i) {
        const auto& s = res.base.steps[i];
        double hi = std::min(s.t0 + s.h, res.base.t_end);
        double acc = 0.0;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            double tau = 0.5 * (s.t0 + hi) + 0.5 * (hi - s.t0) * gl.nodes[q];
            acc += 0.5 * (hi - s.t0) * gl.weights[q] * bnorm(tau);
        }
        cum[i + 1] = cum[i] + acc;
    }
    auto cum_at = [&](double tau) {
        // locate the step, integrate the partial piece
        const auto& steps = res.base.steps;
        if (steps.empty()) return 0.0;
        std::size_t lo = 0, hi = steps.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (steps[mid].t0 <= tau)
                lo = mid;
            else
                hi = mid - 1;
        }
        double acc = cum[lo];
        double a = steps[lo].t0, b = std::min(tau, res.base.t_end);
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            double tt = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
            acc += 0.5 * (b - a) * gl.weights[q] * bnorm(tt);
        }
        return acc;
    };

    double ny = field.cone.norm_of(y);
    int gp = std::max(grid_points, 2);
    for (int i = 0; i < gp; ++i) {
        double tau = t * double(i) / double(gp - 1);
        res.times.push_back(tau);
        res.w.push_back(res.w_at(tau));
        res.bound.push_back(ny * std::exp(cum_at(tau)));
    }
    return res;
}

CertReport sandwich_check(const VectorField& field, const Vec& x, const Vec& y, double t,
                          double tol, const IntegrateOptions& opts) {
    CertReport rep;
    rep.tolerance = tol;
    rep.samples_tested = 1;
    Vec dir = vsub(y, x);
    LinearFlowResult wx = variational_solve(field, x, dir, t, 2, opts);
    LinearFlowResult wy = variational_solve(field, y, dir, t, 2, opts);
    Vec diff = vsub(wy.base.eval(t), wx.base.eval(t));
    Vec lo = wx.w_at(t), hi = wy.w_at(t);
    if (!field.cone.leq(lo, diff, tol)) {
        rep.verdict = Verdict::Fail;
        Witness w;
        w.t = t;
        w.points = {lo, diff};
        w.violation = field.cone.leq_violation(lo, diff);
        w.note = "sandwich: w^x_{y-x}(t) !<= psi(t,y)-psi(t,x)";
        rep.witness = w;
        return rep;
    }
    if (!field.cone.leq(diff, hi, tol)) {
        rep.verdict = Verdict::Fail;
        Witness w;
        w.t = t;
        w.points = {diff, hi};
        w.violation = field.cone.leq_violation(diff, hi);
        w.note = "sandwich: psi(t,y)-psi(t,x) !<= w^y_{y-x}(t)";
        rep.witness = w;
        return rep;
    }
    rep.verdict = Verdict::Pass;
    return rep;
}

CertReport explicit_bound_check(const VectorField& field, const Vec& x, const Vec& y,
                                double lambda, double t, const Vec& klo, const Vec& khi,
                                double tol, const IntegrateOptions& opts) {
    const std::size_t d = field.dim;
    CertReport rep;
    rep.tolerance = tol;
    rep.samples_tested = 1;
    Trajectory tx = integrate(field, x, t, opts);
    Trajectory ty = integrate(field, y, t, opts);
    if (tx.status != TrajStatus::ReachedTarget || ty.status != TrajStatus::ReachedTarget)
        throw std::invalid_argument("explicit_bound_check: trajectory escapes before t");
    auto in_box = [&](const Vec& v) {
        for (std::size_t i = 0; i < d; ++i)
            if (v[i] < klo[i] - 1e-12 || v[i] > khi[i] + 1e-12) return false;
        return true;
    };
    for (int i = 0; i <= 50; ++i) {
        double tau = t * double(i) / 50.0;
        if (!in_box(tx.eval(tau)) || !in_box(ty.eval(tau)))
            throw std::invalid_argument("explicit_bound_check: trajectories leave K");
    }
    // R_K over the box corners (the norm is maximized at a vertex)
    double rk = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t(1) << d); ++corner) {
        Vec v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = (corner >> i) & 1 ? khi[i] : klo[i];
        rk = std::max(rk, field.cone.norm_of(v));
    }
    double mu = field.cone.normality_constant();
    double lip = lipschitz_estimate(field, t, klo, khi);
    double bound = rk * (1.0 + mu * std::exp(lip * t));
    Vec z = lerp(x, y, lambda);
    Trajectory tz = integrate(field, z, t, opts);
    if (tz.status != TrajStatus::ReachedTarget)
        throw std::invalid_argument("explicit_bound_check: combination escapes before t");
    double lhs = field.cone.norm_of(tz.eval(t));
    rep.detail = "R_K=" + std::to_string(rk) + " L=" + std::to_string(lip) +
                 " bound=" + std::to_string(bound);
    if (lhs <= bound + tol) {
        rep.verdict = Verdict::Pass;
    } else {
        rep.verdict = Verdict::Fail;
        Witness w;
        w.t = t;
        w.lambda = lambda;
        w.points = {z};
        w.violation = lhs - bound;
        w.note = "explicit bound violated";
        rep.witness = w;
    }
    return rep;
}

}  // namespace coneflow
