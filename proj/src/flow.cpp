#include "coneflow/flow.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace coneflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous-extension coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool usable(const Vec& v, double guard) {
    for (double x : v) {
        if (!std::isfinite(x) || std::abs(x) > guard) return false;
    }
    return true;
}

Vec dense_in_step(const Trajectory::Step& s, double theta) {
    const std::size_t n = s.r1.size();
    Vec y(n);
    double om = 1.0 - theta;
    for (std::size_t i = 0; i < n; ++i)
        y[i] = s.r1[i] + theta * (s.r2[i] + om * (s.r3[i] + theta * (s.r4[i] + om * s.r5[i])));
    return y;
}

}  // namespace

Vec Trajectory::eval(double t) const {
    if (steps.empty()) return x0;
    t = std::clamp(t, 0.0, t_end);
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (steps[mid].t0 <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    const Step& s = steps[lo];
    double theta = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    return dense_in_step(s, theta);
}

Vec Trajectory::deriv(double t) const {
    if (steps.empty()) return Vec(x0.size(), 0.0);
    t = std::clamp(t, 0.0, t_end);
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (steps[mid].t0 <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    const Step& s = steps[lo];
    double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    const std::size_t n = s.r1.size();
    Vec dy(n);
    for (std::size_t i = 0; i < n; ++i) {
        dy[i] = (s.r2[i] + (1.0 - 2.0 * th) * s.r3[i] + th * (2.0 - 3.0 * th) * s.r4[i] +
                 2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * s.r5[i]) /
                s.h;
    }
    return dy;
}

Trajectory integrate(const VectorField& field, const Vec& x0, double t_target,
                     const IntegrateOptions& opts) {
    if (x0.size() != field.dim) throw std::invalid_argument("integrate: x0 dimension mismatch");
    if (!field.domain.contains(x0)) throw std::invalid_argument("integrate: x0 outside U");
    if (t_target < 0.0 || t_target >= field.horizon)
        throw std::invalid_argument("integrate: t_target outside [0, horizon)");

    const std::size_t n = field.dim;
    Trajectory traj;
    traj.x0 = x0;
    if (t_target == 0.0) {
        traj.t_end = 0.0;
        traj.status = TrajStatus::ReachedTarget;
        return traj;
    }

    double t = 0.0;
    Vec y = x0;
    Vec k1 = field.eval(0.0, y);
    ++traj.stats.rhs_evals;
    if (!usable(k1, opts.overflow_guard)) throw std::invalid_argument("integrate: f(0, x0) not finite");

    // initial step size heuristic
    double d0 = 0.0, dd1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sc = opts.atol + opts.rtol * std::abs(y[i]);
        d0 += (y[i] / sc) * (y[i] / sc);
        dd1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    dd1 = std::sqrt(dd1 / n);
    double h = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h = std::min(h, t_target);

    Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n);

    auto stage = [&](double tt, const Vec& yy, Vec& out) -> bool {
        if (!usable(yy, opts.overflow_guard)) return false;
        out = field.eval(tt, yy);
        ++traj.stats.rhs_evals;
        return usable(out, opts.overflow_guard);
    };

    while (t < t_target) {
        if (traj.stats.accepted + traj.stats.rejected > opts.max_steps)
            throw std::runtime_error("integrate: max_steps exceeded");
        h = std::min(h, t_target - t);
        double hmin = 1e3 * DBL_EPSILON * std::max(std::abs(t), 1e-6);
        if (t_target - t < hmin) {
            // the remaining gap is rounding noise, not a collapsing step
            traj.t_end = t_target;
            traj.status = TrajStatus::ReachedTarget;
            return traj;
        }
        if (h < hmin) {
            // step collapse: blow-up inside U or a vanishing margin
            traj.t_end = t;
            traj.theta_lo = t;
            traj.theta_hi = t + 1e-7 * std::max(1.0, t);
            double m = field.domain.margin(y);
            traj.status = (std::isfinite(m) && m <= std::max(opts.escape_margin, 1e-6))
                              ? TrajStatus::EscapedDomain
                              : TrajStatus::StepCollapse;
            return traj;
        }

        bool ok = true;
        ok = ok && stage(t + c2 * h, vaxpy(y, h * a21, k1), k2);
        if (ok) {
            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            ok = stage(t + c3 * h, ytmp, k3);
        }
        if (ok) {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            ok = stage(t + c4 * h, ytmp, k4);
        }
        if (ok) {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            ok = stage(t + c5 * h, ytmp, k5);
        }
        if (ok) {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] =
                    y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            ok = stage(t + h, ytmp, k6);
        }
        if (ok) {
            for (std::size_t i = 0; i < n; ++i)
                y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            ok = stage(t + h, y5, k7);
        }
        if (!ok) {
            ++traj.stats.rejected;
            h *= 0.5;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
            double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);

        if (err > 1.0) {
            ++traj.stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        // accept: build the continuous extension
        Trajectory::Step st;
        st.t0 = t;
        st.h = h;
        st.r1 = y;
        st.r2 = vsub(y5, y);
        st.r3 = vsub(vscale(h, k1), st.r2);
        st.r4 = vsub(vsub(st.r2, vscale(h, k7)), st.r3);
        st.r5.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            st.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                            d7 * k7[i]);
        traj.steps.push_back(std::move(st));
        ++traj.stats.accepted;

        if (!field.domain.contains(y5)) {
            // boundary escape: bisect the event time on the dense interpolant
            const Trajectory::Step& s = traj.steps.back();
            double lo = 0.0, hicl = 1.0;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hicl);
                if (field.domain.contains(dense_in_step(s, mid)))
                    lo = mid;
                else
                    hicl = mid;
            }
            traj.theta_lo = t + lo * h;
            traj.theta_hi = t + hicl * h;
            traj.t_end = traj.theta_lo;
            traj.status = TrajStatus::EscapedDomain;
            return traj;
        }

        t += h;
        y = y5;
        k1 = k7;  // FSAL
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
    }
    traj.t_end = t_target;
    traj.status = TrajStatus::ReachedTarget;
    return traj;
}

EscapeBracket escape_time(const VectorField& field, const Vec& x0, const IntegrateOptions& opts,
                          double t_max) {
    double cap;
    if (t_max > 0.0)
        cap = std::isfinite(field.horizon) ? std::min(t_max, field.horizon) : t_max;
    else
        cap = std::isfinite(field.horizon) ? field.horizon : 100.0;
    double target = std::isfinite(field.horizon) && cap >= field.horizon
                        ? field.horizon * (1.0 - 1e-12)
                        : cap;
    Trajectory traj = integrate(field, x0, target, opts);
    if (traj.status == TrajStatus::ReachedTarget) return {cap, cap, true};
    return {traj.theta_lo, traj.theta_hi, false};
}

bool in_domain_D(const VectorField& field, const Vec& x0, double t, const IntegrateOptions& opts) {
    if (t == 0.0) return field.domain.contains(x0);
    EscapeBracket b = escape_time(field, x0, opts, t * (1.0 + 1e-9) + 1e-12);
    return b.lo > t;
}

CertReport flow_convexity_check(const VectorField& field, const Vec& x, const Vec& y,
                                const std::vector<double>& lambdas, double t, double tol,
                                const IntegrateOptions& opts) {
    CertReport rep;
    rep.tolerance = tol;
    Trajectory tx = integrate(field, x, t, opts);
    Trajectory ty = integrate(field, y, t, opts);
    if (tx.status != TrajStatus::ReachedTarget || ty.status != TrajStatus::ReachedTarget)
        throw std::invalid_argument("flow_convexity_check: x or y not in D_f(t)");
    Vec px = tx.eval(t), py = ty.eval(t);
    for (double lambda : lambdas) {
        if (lambda < 0.0 || lambda > 1.0)
            throw std::invalid_argument("flow_convexity_check: lambda outside [0,1]");
        Vec z = lerp(x, y, lambda);
        Trajectory tz = integrate(field, z, t, opts);
        ++rep.samples_tested;
        if (tz.status != TrajStatus::ReachedTarget) {
            rep.verdict = Verdict::Fail;
            Witness w;
            w.t = t;
            w.lambda = lambda;
            w.points = {x, y, z};
            w.violation = t - tz.theta_lo;
            w.note = "combination escaped before t (D_f(t) convexity violated)";
            rep.witness = w;
            return rep;
        }
        Vec pz = tz.eval(t);
        Vec rhs = lerp(px, py, lambda);
        if (!field.cone.leq(pz, rhs, tol)) {
            rep.verdict = Verdict::Fail;
            Witness w;
            w.t = t;
            w.lambda = lambda;
            w.points = {x, y, z};
            w.violation = field.cone.leq_violation(pz, rhs);
            w.note = "flow convexity: psi(t,z) !<= l psi(t,x)+(1-l) psi(t,y)";
            rep.witness = w;
            return rep;
        }
    }
    rep.verdict = Verdict::Pass;
    return rep;
}

CertReport domain_convexity_check(const VectorField& field, const Vec& x, const Vec& y,
                                  const std::vector<double>& lambdas, double time_tol,
                                  const IntegrateOptions& opts, double t_max) {
    CertReport rep;
    rep.tolerance = time_tol;
    EscapeBracket bx = escape_time(field, x, opts, t_max);
    EscapeBracket by = escape_time(field, y, opts, t_max);
    double t0 = std::min(bx.lo, by.lo);
    for (double lambda : lambdas) {
        Vec z = lerp(x, y, lambda);
        EscapeBracket bz = escape_time(field, z, opts, t_max);
        ++rep.samples_tested;
        if (bz.lo < t0 - time_tol) {
            rep.verdict = Verdict::Fail;
            Witness w;
            w.lambda = lambda;
            w.points = {x, y, z};
            w.violation = t0 - bz.lo;
            w.note = "theta(z) < min(theta(x), theta(y))";
            rep.witness = w;
            return rep;
        }
    }
    rep.verdict = Verdict::Pass;
    return rep;
}

CertReport comparison_check(const VectorField& field, const Curve& lower, const Curve& upper,
                            const std::vector<double>& grid, double tol, double premise_tol) {
    if (grid.size() < 5)
        throw std::invalid_argument("comparison_check: grid needs at least 5 points");
    const std::size_t m = grid.size();
    double h = grid[1] - grid[0];
    for (std::size_t i = 1; i < m; ++i)
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("comparison_check: grid must be uniform");

    CertReport rep;
    rep.tolerance = tol;
    std::vector<Vec> lo(m), up(m);
    for (std::size_t i = 0; i < m; ++i) {
        lo[i] = lower(grid[i]);
        up[i] = upper(grid[i]);
        if (!field.domain.contains(lo[i]) || !field.domain.contains(up[i]))
            throw std::invalid_argument("comparison_check: curve leaves U");
    }
    // 4th-order differentiation, one-sided at the ends
    auto diff = [&](const std::vector<Vec>& v, std::size_t i) {
        const std::size_t n = v[0].size();
        Vec dv(n);
        for (std::size_t k = 0; k < n; ++k) {
            double d;
            if (i >= 2 && i + 2 < m)
                d = (v[i - 2][k] - 8 * v[i - 1][k] + 8 * v[i + 1][k] - v[i + 2][k]) / (12 * h);
            else if (i == 0)
                d = (-25 * v[0][k] + 48 * v[1][k] - 36 * v[2][k] + 16 * v[3][k] - 3 * v[4][k]) /
                    (12 * h);
            else if (i == 1)
                d = (-3 * v[0][k] - 10 * v[1][k] + 18 * v[2][k] - 6 * v[3][k] + v[4][k]) / (12 * h);
            else if (i == m - 2)
                d = (3 * v[m - 1][k] + 10 * v[m - 2][k] - 18 * v[m - 3][k] + 6 * v[m - 4][k] -
                     v[m - 5][k]) /
                    (12 * h);
            else
                d = (25 * v[m - 1][k] - 48 * v[m - 2][k] + 36 * v[m - 3][k] - 16 * v[m - 4][k] +
                     3 * v[m - 5][k]) /
                    (12 * h);
            dv[k] = d;
        }
        return dv;
    };

    // premise: initial order and ordered defects
    if (!field.cone.leq(lo[0], up[0], premise_tol)) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "premise violated: lower(0) !<= upper(0)";
        return rep;
    }
    for (std::size_t i = 0; i < m; ++i) {
        Vec def_lo = vsub(diff(lo, i), field.eval(grid[i], lo[i]));
        Vec def_up = vsub(diff(up, i), field.eval(grid[i], up[i]));
        ++rep.samples_tested;
        if (!field.cone.leq(def_lo, def_up, premise_tol)) {
            rep.verdict = Verdict::Inconclusive;
            Witness w;
            w.t = grid[i];
            w.points = {def_lo, def_up};
            w.violation = field.cone.leq_violation(def_lo, def_up);
            w.note = "premise violated: defect(lower) !<= defect(upper)";
            rep.witness = w;
            rep.detail = "premise violated at a grid point";
            return rep;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!field.cone.leq(lo[i], up[i], tol)) {
            rep.verdict = Verdict::Fail;
            Witness w;
            w.t = grid[i];
            w.points = {lo[i], up[i]};
            w.violation = field.cone.leq_violation(lo[i], up[i]);
            w.note = "comparison conclusion violated: lower(t) !<= upper(t)";
            rep.witness = w;
            return rep;
        }
    }
    rep.verdict = Verdict::Pass;
    return rep;
}

CertReport subsuper_convexity_check(const VectorField& field, const Vec& x1_0, const Vec& x2_0,
                                    double lambda, double t, double tol,
                                    const IntegrateOptions& opts) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("subsuper_convexity_check: lambda outside [0,1]");
    Vec x3_0 = lerp(x1_0, x2_0, lambda);
    Trajectory t1 = integrate(field, x1_0, t, opts);
    Trajectory t2 = integrate(field, x2_0, t, opts);
    Trajectory t3 = integrate(field, x3_0, t, opts);
    if (t1.status != TrajStatus::ReachedTarget || t2.status != TrajStatus::ReachedTarget ||
        t3.status != TrajStatus::ReachedTarget)
        throw std::invalid_argument("subsuper_convexity_check: a trajectory escapes before t");
    CertReport rep;
    rep.tolerance = tol;
    rep.samples_tested = 1;
    Vec rhs = lerp(t1.eval(t), t2.eval(t), lambda);
    Vec lhs = t3.eval(t);
    if (field.cone.leq(lhs, rhs, tol)) {
        rep.verdict = Verdict::Pass;
    } else {
        rep.verdict = Verdict::Fail;
        Witness w;
        w.t = t;
        w.lambda = lambda;
        w.points = {x1_0, x2_0, x3_0};
        w.violation = field.cone.leq_violation(lhs, rhs);
        w.note = "sub/supersolution convexity inequality violated";
        rep.witness = w;
    }
    return rep;
}

CertReport semigroup_check(const VectorField& field, const Vec& x0, double s, double t, double tol,
                           const IntegrateOptions& opts) {
    CertReport rep;
    rep.tolerance = tol;
    rep.samples_tested = 1;
    Trajectory full = integrate(field, x0, s + t, opts);
    if (full.status != TrajStatus::ReachedTarget)
        throw std::invalid_argument("semigroup_check: escape before s+t");
    Vec a = full.eval(s + t);
    Vec mid = full.eval(s);
    Trajectory second = integrate(field, mid, t, opts);
    if (second.status != TrajStatus::ReachedTarget)
        throw std::invalid_argument("semigroup_check: escape on the second leg");
    Vec b = second.eval(t);
    double gap = field.cone.norm_of(vsub(a, b));
    double bound = tol * (1.0 + field.cone.norm_of(a));
    if (gap <= bound) {
        rep.verdict = Verdict::Pass;
    } else {
        rep.verdict = Verdict::Fail;
        Witness w;
        w.t = s + t;
        w.points = {a, b};
        w.violation = gap;
        w.note = "semigroup property violated beyond tolerance";
        rep.witness = w;
    }
    return rep;
}

void write_trajectory_csv(const Trajectory& traj, std::size_t dim, const std::string& path,
                          int extra_samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
    out << std::setprecision(17);
    out << "t";
    for (std::size_t i = 1; i <= dim; ++i) out << ",x_" << i;
    out << "\n";
    std::vector<double> times;
    for (const auto& s : traj.steps) times.push_back(s.t0);
    times.push_back(traj.t_end);
    for (int i = 1; i < extra_samples; ++i)
        times.push_back(traj.t_end * double(i) / double(extra_samples));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) {
        Vec y = traj.eval(t);
        out << t;
        for (double v : y) out << "," << v;
        out << "\n";
    }
}

}  // namespace coneflow
